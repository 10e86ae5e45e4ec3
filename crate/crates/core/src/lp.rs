//! Fractional clique cover number by exact rational simplex over the
//! maximal cliques of a graph.

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::exact::format_rational;

pub const DEFAULT_CLIQUE_CAP: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("graph has {n} vertices, above the clique enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("graph must have at least one vertex")]
    EmptyGraph,
}

/// Maximal cliques, each sorted ascending, the list sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueList {
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

pub fn maximal_cliques(g: &Graph) -> Result<CliqueList, LpError> {
    maximal_cliques_capped(g, DEFAULT_CLIQUE_CAP)
}

pub fn maximal_cliques_capped(g: &Graph, cap: usize) -> Result<CliqueList, LpError> {
    let n = g.n();
    if n > cap {
        return Err(LpError::CapExceeded { n, cap });
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut p = FixedBitSet::with_capacity(n);
        p.insert_range(..);
        bron_kerbosch(g, &mut Vec::new(), p, FixedBitSet::with_capacity(n), &mut out);
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(CliqueList { cliques: out })
}

fn bron_kerbosch(g: &Graph, r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
    if p.is_clear() {
        if x.is_clear() {
            out.push(r.clone());
        }
        return;
    }
    // pivot maximising |P ∩ N(u)|
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| (p.intersection(g.neighbors(u)).count(), std::cmp::Reverse(u)))
        .expect("P non-empty");
    let mut candidates = p.clone();
    candidates.difference_with(g.neighbors(pivot));
    for v in candidates.ones() {
        let nv = g.neighbors(v);
        let mut p2 = p.clone();
        p2.intersect_with(nv);
        let mut x2 = x.clone();
        x2.intersect_with(nv);
        r.push(v);
        bron_kerbosch(g, r, p2, x2, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

/// Optimal pair for the clique-cover LP: `primal_weights` are per clique (in
/// [`CliqueList`] order), `dual_weights` per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub optimum: BigRational,
    pub cliques: CliqueList,
    pub primal_weights: Vec<BigRational>,
    pub dual_weights: Vec<BigRational>,
    pub pivots: usize,
}

impl LpResult {
    /// Every vertex covered with weight ≥ 1, every clique packs weight ≤ 1,
    /// all weights non-negative and both objectives equal to `optimum`.
    pub fn certify(&self, g: &Graph) -> bool {
        let one = BigRational::one();
        let nonneg = self.primal_weights.iter().chain(&self.dual_weights).all(|w| !w.is_negative());
        let covered = (0..g.n()).all(|v| {
            let s: BigRational = self
                .cliques
                .cliques
                .iter()
                .zip(&self.primal_weights)
                .filter(|(c, _)| c.contains(&v))
                .map(|(_, w)| w.clone())
                .sum();
            s >= one
        });
        let packed = self
            .cliques
            .cliques
            .iter()
            .all(|c| c.iter().map(|&v| self.dual_weights[v].clone()).sum::<BigRational>() <= one);
        let primal: BigRational = self.primal_weights.iter().cloned().sum();
        let dual: BigRational = self.dual_weights.iter().cloned().sum();
        nonneg && covered && packed && primal == self.optimum && dual == self.optimum
    }

    pub fn to_json(&self) -> Value {
        let strs = |ws: &[BigRational]| ws.iter().map(format_rational).collect::<Vec<_>>();
        json!({
            "optimum": format_rational(&self.optimum),
            "value": crate::linalg::exact::rational_to_f64(&self.optimum),
            "cliques": self.cliques.cliques,
            "primal_weights": strs(&self.primal_weights),
            "dual_weights": strs(&self.dual_weights),
        })
    }
}

/// χ̄_f(G) with an exact optimality certificate.
pub fn fractional_clique_cover(g: &Graph) -> Result<LpResult, LpError> {
    if g.n() == 0 {
        return Err(LpError::EmptyGraph);
    }
    let cliques = maximal_cliques(g)?;
    let rows: Vec<Vec<usize>> = cliques.cliques.clone();
    let sol = simplex_packing(g.n(), &rows);
    let result = LpResult {
        optimum: sol.value,
        cliques,
        primal_weights: sol.duals,
        dual_weights: sol.x,
        pivots: sol.pivots,
    };
    debug_assert!(result.certify(g));
    Ok(result)
}

struct Packing {
    value: BigRational,
    x: Vec<BigRational>,
    duals: Vec<BigRational>,
    pivots: usize,
}

/// max Σ x_j s.t. Σ_{j ∈ row} x_j ≤ 1 for each row, x ≥ 0. Tableau simplex
/// from the all-slack basis with Bland's rule.
fn simplex_packing(nvars: usize, rows: &[Vec<usize>]) -> Packing {
    let m = rows.len();
    let width = nvars + m;
    // tableau rows: coefficients then rhs
    let mut t: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = vec![BigRational::zero(); width + 1];
            for &j in row {
                r[j] = BigRational::one();
            }
            r[nvars + i] = BigRational::one();
            r[width] = BigRational::one();
            r
        })
        .collect();
    // objective row holds reduced costs c_B B^{-1} A_j - c_j and the value
    let mut obj = vec![BigRational::zero(); width + 1];
    for o in obj.iter_mut().take(nvars) {
        *o = -BigRational::one();
    }
    let mut basis: Vec<usize> = (nvars..width).collect();
    let mut pivots = 0;
    while let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in t.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.expect("packing LP is bounded");
        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        basis[r] = enter;
        pivots += 1;
    }
    let mut x = vec![BigRational::zero(); nvars];
    for (i, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = t[i][width].clone();
        }
    }
    Packing {
        value: obj[width].clone(),
        x,
        duals: obj[nvars..width].to_vec(),
        pivots,
    }
}
