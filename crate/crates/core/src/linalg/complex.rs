//! Dense complex matrices with an explicit comparison tolerance.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

pub type C64 = Complex64;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry")]
    NonFinite,
    #[error("matrix is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is not Hermitian")]
    NotHermitian,
}

/// Row-major complex matrix. `tol` is used by every approximate predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
    pub tol: f64,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
            tol: DEFAULT_TOL,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::Shape(format!("{} entries for {rows}x{cols}", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            data,
            tol: DEFAULT_TOL,
        })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, MatrixError> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// The matrix unit |i⟩⟨j|.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = C64::one();
        m
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self::from_vec(v.len(), 1, v.to_vec()).expect("length matches")
    }

    /// |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn require_square(&self) -> Result<usize, MatrixError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
            tol: self.tol,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols).with_tol(self.tol);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &CMatrix) -> Result<Self, MatrixError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &CMatrix) -> Result<Self, MatrixError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Result<Self, MatrixError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(MatrixError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
            tol: self.tol,
        })
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(r, c).with_tol(self.tol);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &CMatrix) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols).with_tol(self.tol);
        out.place(0, 0, self);
        out.place(self.rows, self.cols, other);
        out
    }

    pub fn place(&mut self, row: usize, col: usize, block: &CMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(row + i, col + j)]).with_tol(self.tol)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert–Schmidt inner product Tr(A†B).
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn is_real_within(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= self.tol
    }

    /// Hermitian within `tol` and smallest eigenvalue ≥ −tol.
    pub fn psd_check(&self) -> Result<bool, MatrixError> {
        self.require_square()?;
        if !self.is_hermitian() {
            return Ok(false);
        }
        Ok(self.hermitian_eigen().values.first().is_none_or(|&l| l >= -self.tol))
    }

    /// Hermitian within `tol` and ‖M² − M‖_max ≤ tol.
    pub fn projector_check(&self) -> Result<bool, MatrixError> {
        self.require_square()?;
        if !self.is_hermitian() {
            return Ok(false);
        }
        let sq = self.matmul(self)?;
        Ok(sq.max_abs_diff(self) <= self.tol)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64, MatrixError> {
        self.require_square()?;
        Ok(self.hermitian_eigen().values.first().copied().unwrap_or(f64::INFINITY))
    }

    pub fn is_positive_definite(&self) -> Result<bool, MatrixError> {
        Ok(self.is_hermitian() && self.min_eigenvalue()? > self.tol)
    }

    /// Eigen-decomposition of the Hermitian part (A + A†)/2 by the cyclic
    /// complex Jacobi method. Eigenvalues ascending; `vectors` column k is the
    /// eigenvector of `values[k]`.
    pub fn hermitian_eigen(&self) -> Eigen {
        let n = self.rows;
        let mut a = Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut v = Self::identity(n);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    // phase to make the pivot real, then a real Jacobi rotation
                    let phase = apq / r;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                    let (s, c) = theta.sin_cos();
                    // columns: p' = c p - s e^{-iφ}... combined unitary J with
                    // J[p,p]=c, J[q,p]=-s conj(phase), J[p,q]=s phase, J[q,q]=c
                    let jpq = phase * s;
                    let jqp = -phase.conj() * s;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c + aqk * jqp.conj();
                        a[(q, k)] = apk * jpq.conj() + aqk * c;
                    }
                    a[(p, q)] = C64::zero();
                    a[(q, p)] = C64::zero();
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * c;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = Self::from_fn(n, n, |i, k| v[(i, order[k])]);
        Eigen { values, vectors }
    }

    /// f(A) for Hermitian A through its spectral decomposition.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Self {
        let e = self.hermitian_eigen();
        let n = self.rows;
        let mut out = Self::zeros(n, n).with_tol(self.tol);
        for (k, &l) in e.values.iter().enumerate() {
            let fl = f(l);
            if fl == 0.0 {
                continue;
            }
            let u = e.vectors.col(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += u[i] * u[j].conj() * fl;
                }
            }
        }
        out
    }

    /// Positive square root of a PSD matrix (negative eigenvalues clipped).
    pub fn sqrt_psd(&self) -> Self {
        self.hermitian_function(|l| l.max(0.0).sqrt())
    }

    /// ρ^{-1/2} for positive definite ρ.
    pub fn inv_sqrt_pd(&self) -> Result<Self, MatrixError> {
        let min = self.min_eigenvalue()?;
        if min <= self.tol {
            return Err(MatrixError::NotPositiveDefinite(min));
        }
        Ok(self.hermitian_function(|l| 1.0 / l.sqrt()))
    }

    /// Singular values in descending order (one-sided Hestenes Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        let (m, n) = (self.rows, self.cols);
        if m == 0 || n == 0 {
            return Vec::new();
        }
        // work on columns of the taller orientation
        let a = if m >= n { self.clone() } else { self.adjoint() };
        let (m, n) = (a.rows, a.cols);
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
        for _sweep in 0..100 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for k in 0..m {
                        let x = cols[p][k];
                        let y = cols[q][k];
                        cols[p][k] = x * c - y * phase.conj() * s;
                        cols[q][k] = x * phase * s + y * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Number of singular values above `tol` times the largest.
    pub fn rank_numeric(&self) -> usize {
        let sv = self.singular_values();
        let Some(&top) = sv.first() else { return 0 };
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > self.tol * top).count()
    }

    /// R(E) = [[Re E, Im E], [−Im E, Re E]].
    pub fn realify(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let mut out = Self::zeros(2 * r, 2 * c).with_tol(self.tol);
        for i in 0..r {
            for j in 0..c {
                let z = self[(i, j)];
                out[(i, j)] = C64::new(z.re, 0.0);
                out[(i, c + j)] = C64::new(z.im, 0.0);
                out[(r + i, j)] = C64::new(-z.im, 0.0);
                out[(r + i, c + j)] = C64::new(z.re, 0.0);
            }
        }
        out
    }

    /// Exact rank over ℚ(i) of the (dyadic) floating entries, computed as
    /// half the rational rank of the realification.
    pub fn rank_exact_dyadic(&self) -> usize {
        let r = self.realify();
        let values: Vec<BigRational> = r.data.iter().map(|z| f64_to_rational(z.re)).collect();
        let m = super::exact::ExactMatrix::from_rationals(r.rows, r.cols, values).expect("shape");
        m.rank() / 2
    }

    /// Haar-ish random unitary via Gram–Schmidt on a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g = Self::random_gaussian(n, n, rng);
            let cols: Vec<Vec<C64>> = (0..n).map(|j| g.col(j)).collect();
            if let Some(q) = orthonormalize(&cols) {
                if q.len() == n {
                    return Self::from_fn(n, n, |i, j| q[j][i]);
                }
            }
        }
    }

    pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| C64::new(gaussian(rng), gaussian(rng)))
    }

    /// Random unit vector in ℂ^n.
    pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..n).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
            let norm = vec_norm(&v);
            if norm > 1e-6 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }
}

pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Gram–Schmidt with one re-orthogonalisation pass. Returns `None` if any
/// input is dependent on the previous ones.
fn orthonormalize(vs: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = vec_inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm < 1e-8 * vec_norm(v).max(1.0) {
            return None;
        }
        out.push(w.into_iter().map(|z| z / norm).collect());
    }
    Some(out)
}

/// Exact value of a finite double as a rational.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar for same-shape arithmetic; panics on shape mismatch.
impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("shape mismatch in +")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("shape mismatch in -")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch in *")
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

/// Sum of a non-empty family of same-shape matrices.
pub fn sum_all<'a>(ms: impl IntoIterator<Item = &'a CMatrix>, rows: usize, cols: usize) -> CMatrix {
    ms.into_iter().fold(CMatrix::zeros(rows, cols), |acc, m| &acc + m)
}
