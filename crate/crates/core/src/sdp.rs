//! Lovász theta by a dense primal-dual interior point method.
//!
//! Solves `max <J,X>` subject to `Tr X = 1`, `X_ab = 0` on edges, `X ⪰ 0`,
//! written as `min <C,X>` with `C = -J` and constraint matrices `A_0 = I`,
//! `A_e = E_ab + E_ba`. Directions use Nesterov–Todd scaling and a Mehrotra
//! predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::CMatrix;
use crate::nc::NcGraph;

pub const MAX_ITERATIONS: usize = 200;
const GAP_TOL: f64 = 1e-9;
const STEP_FRACTION: f64 = 0.98;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("no convergence after {iterations} iterations (gap {gap:e}, primal residual {primal_residual:e}, dual residual {dual_residual:e})")]
    NoConvergence {
        iterations: usize,
        gap: f64,
        primal_residual: f64,
        dual_residual: f64,
    },
    #[error("nc-graph has no graph provenance; theta is only available for S_G")]
    Unsupported,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// `<J,X>` at the final primal iterate.
    pub value: f64,
    /// `-y_0`, the matching dual bound.
    pub dual_value: f64,
    pub primal_matrix: CMatrix,
    pub dual_matrix: CMatrix,
    /// `<X,Z>`.
    pub gap: f64,
    pub primal_residual: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn to_json(&self, with_matrices: bool) -> Value {
        let mut v = json!({
            "value": self.value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "primal_residual": self.primal_residual,
            "iterations": self.iterations,
        });
        if with_matrices {
            v["primal_matrix"] = crate::wire::real_matrix_json(&self.primal_matrix);
            v["dual_matrix"] = crate::wire::real_matrix_json(&self.dual_matrix);
        }
        v
    }
}

/// ϑ(G). The 0-vertex graph has value 0.
pub fn lovasz_theta(g: &Graph) -> Result<SdpSolution, SdpError> {
    let n = g.n();
    if n == 0 {
        return Ok(SdpSolution {
            value: 0.0,
            dual_value: 0.0,
            primal_matrix: CMatrix::zeros(0, 0),
            dual_matrix: CMatrix::zeros(0, 0),
            gap: 0.0,
            primal_residual: 0.0,
            iterations: 0,
        });
    }
    ThetaSolver::new(g).solve()
}

/// Convenience wrapper returning only the value.
pub fn theta_value(g: &Graph) -> Result<f64, SdpError> {
    lovasz_theta(g).map(|s| s.value)
}

/// ϑ̃ for nc-graphs of the form S_G, where it equals ϑ(G).
pub fn theta_tilde_graph(s: &NcGraph) -> Result<SdpSolution, SdpError> {
    match &s.provenance {
        Some(g) => lovasz_theta(g),
        None => Err(SdpError::Unsupported),
    }
}

struct ThetaSolver {
    n: usize,
    edges: Vec<(usize, usize)>,
    c: DMatrix<f64>,
    b: DVector<f64>,
}

struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
}

impl ThetaSolver {
    fn new(graph: &Graph) -> Self {
        let n = graph.n();
        let edges: Vec<(usize, usize)> = graph.edges().collect();
        let mut b = DVector::zeros(edges.len() + 1);
        b[0] = 1.0;
        Self {
            n,
            edges,
            c: -DMatrix::from_element(n, n, 1.0),
            b,
        }
    }

    fn m(&self) -> usize {
        self.edges.len() + 1
    }

    /// A(X)_i = <A_i, X>.
    fn apply_a(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        out[0] = x.trace();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            out[k + 1] = x[(a, b)] + x[(b, a)];
        }
        out
    }

    /// Σ y_i A_i.
    fn apply_at(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.n, self.n) * y[0];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            out[(a, b)] += y[k + 1];
            out[(b, a)] += y[k + 1];
        }
        out
    }

    fn schur(&self, w: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m();
        let w2 = w * w;
        let mut s = DMatrix::zeros(m, m);
        s[(0, 0)] = w.norm_squared();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let v = 2.0 * w2[(a, b)];
            s[(0, k + 1)] = v;
            s[(k + 1, 0)] = v;
        }
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            for (l, &(c, d)) in self.edges.iter().enumerate().skip(k) {
                let v = 2.0 * (w[(b, c)] * w[(a, d)] + w[(b, d)] * w[(a, c)]);
                s[(k + 1, l + 1)] = v;
                s[(l + 1, k + 1)] = v;
            }
        }
        s
    }

    fn scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
        let l = Cholesky::new(x.clone())?.l();
        let r = Cholesky::new(z.clone())?.l();
        let svd = (r.transpose() * &l).svd(true, true);
        let v = svd.v_t?.transpose();
        let u = svd.u?;
        let d = svd.singular_values;
        if d.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
            return None;
        }
        let d_isqrt = DMatrix::from_diagonal(&d.map(|s| 1.0 / s.sqrt()));
        let g = &l * &v * &d_isqrt;
        // G^{-1} = D^{-1/2} U^T R^T, from R^T L V = U D
        let g_inv = &d_isqrt * u.transpose() * r.transpose();
        let w = &g * g.transpose();
        Some(Scaling { g, g_inv, w, d })
    }

    /// Largest step in (0, 1] keeping `x + a dx` PSD, damped by STEP_FRACTION.
    fn step_length(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
        let Some(chol) = Cholesky::new(x.clone()) else {
            return 0.0;
        };
        let l = chol.l();
        let linv_dx = l.solve_lower_triangular(dx).expect("triangular solve");
        let m = l.solve_lower_triangular(&linv_dx.transpose()).expect("triangular solve");
        let sym = (&m + m.transpose()) * 0.5;
        let min = SymmetricEigen::new(sym).eigenvalues.min();
        if min >= 0.0 {
            1.0
        } else {
            (-STEP_FRACTION / min).min(1.0)
        }
    }

    fn direction(
        &self,
        chol_m: &Cholesky<f64, nalgebra::Dyn>,
        sc: &Scaling,
        r_p: &DVector<f64>,
        r_d: &DMatrix<f64>,
        r_c: &DMatrix<f64>,
    ) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
        let wrw = &sc.w * r_d * &sc.w;
        let rhs = r_p - self.apply_a(r_c) + self.apply_a(&wrw);
        let dy = chol_m.solve(&rhs);
        let dz = r_d - self.apply_at(&dy);
        let dx = r_c - &sc.w * &dz * &sc.w;
        let dx = (&dx + dx.transpose()) * 0.5;
        (dx, dy, dz)
    }

    /// R_c = G S G^T with S_ij = R_ij / (d_i + d_j).
    fn complementarity_rhs(sc: &Scaling, r: &DMatrix<f64>) -> DMatrix<f64> {
        let n = sc.d.len();
        let s = DMatrix::from_fn(n, n, |i, j| r[(i, j)] / (sc.d[i] + sc.d[j]));
        &sc.g * s * sc.g.transpose()
    }

    fn solve(&self) -> Result<SdpSolution, SdpError> {
        let n = self.n;
        let nf = n as f64;
        let mut x = DMatrix::identity(n, n) / nf;
        let mut y = DVector::zeros(self.m());
        y[0] = -(nf + 1.0);
        let mut z = &self.c - self.apply_at(&y);
        let mut iterations = 0;
        loop {
            let gap = x.dot(&z);
            let value = x.sum();
            let r_p = &self.b - self.apply_a(&x);
            let r_d = &self.c - self.apply_at(&y) - &z;
            let primal_residual = r_p.amax();
            let dual_residual = r_d.amax();
            let converged = gap <= GAP_TOL * (1.0 + value.abs()) && primal_residual <= 1e-9 && dual_residual <= 1e-9;
            let stalled = iterations >= MAX_ITERATIONS;
            let scaling = if converged || stalled {
                None
            } else {
                Self::scaling(&x, &z)
            };
            let Some(sc) = scaling else {
                // a numerically singular iterate close to the optimum is accepted
                let acceptable = gap <= 1e-7 * (1.0 + value.abs()) && primal_residual <= 1e-8;
                if converged || acceptable {
                    return Ok(self.finish(x, y, z, iterations));
                }
                return Err(SdpError::NoConvergence {
                    iterations,
                    gap,
                    primal_residual,
                    dual_residual,
                });
            };
            iterations += 1;
            let mu = gap / nf;
            let Some(chol_m) = Cholesky::new(self.schur(&sc.w)) else {
                let acceptable = gap <= 1e-7 * (1.0 + value.abs()) && primal_residual <= 1e-8;
                if acceptable {
                    return Ok(self.finish(x, y, z, iterations));
                }
                return Err(SdpError::NoConvergence {
                    iterations,
                    gap,
                    primal_residual,
                    dual_residual,
                });
            };
            let d2 = DMatrix::from_diagonal(&sc.d.map(|s| s * s));

            // predictor
            let r_aff = &d2 * -2.0;
            let rc_aff = Self::complementarity_rhs(&sc, &r_aff);
            let (dx_a, _, dz_a) = self.direction(&chol_m, &sc, &r_p, &r_d, &rc_aff);
            let ap = Self::step_length(&x, &dx_a);
            let ad = Self::step_length(&z, &dz_a);
            let gap_aff = (&x + &dx_a * ap).dot(&(&z + &dz_a * ad));
            let sigma = (gap_aff / gap).clamp(0.0, 1.0).powi(3);

            // corrector
            let dxt = &sc.g_inv * &dx_a * sc.g_inv.transpose();
            let dzt = sc.g.transpose() * &dz_a * &sc.g;
            let cross = &dxt * &dzt + &dzt * &dxt;
            let r = DMatrix::identity(n, n) * (2.0 * sigma * mu) - &d2 * 2.0 - cross;
            let rc = Self::complementarity_rhs(&sc, &r);
            let (dx, dy, dz) = self.direction(&chol_m, &sc, &r_p, &r_d, &rc);
            let ap = Self::step_length(&x, &dx);
            let ad = Self::step_length(&z, &dz);
            x += &dx * ap;
            x = (&x + x.transpose()) * 0.5;
            y += &dy * ad;
            z += &dz * ad;
            z = (&z + z.transpose()) * 0.5;
        }
    }

    fn finish(&self, x: DMatrix<f64>, y: DVector<f64>, z: DMatrix<f64>, iterations: usize) -> SdpSolution {
        let to_c = |m: &DMatrix<f64>| CMatrix::from_fn(self.n, self.n, |i, j| crate::linalg::C64::new(m[(i, j)], 0.0));
        SdpSolution {
            value: x.sum(),
            dual_value: -y[0],
            gap: x.dot(&z),
            primal_residual: (&self.b - self.apply_a(&x)).amax(),
            primal_matrix: to_c(&x),
            dual_matrix: to_c(&z),
            iterations,
        }
    }
}
