//! Certificates for the quantum (≤_q) and entanglement-assisted (≤_*)
//! cohomomorphism preorders, orthonormal and projective representations.
//!
//! A certificate for the pair `G ≤ H` stores the homomorphism data for
//! `complement(G) → complement(H)`. Verifiers phrase the conditions in terms
//! of `G` and `H` directly: for distinct non-adjacent `g, g'` of `G` and
//! equal-or-adjacent `h, h'` of `H` the product of the two operators must
//! vanish.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{CMatrix, MatrixError, C64};
use crate::wire::{self, WireError};

/// Tolerance for certificates supplied from outside the library.
pub const USER_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input certificate is not valid: {0}")]
    InvalidInput(String),
    #[error("middle graphs of the composed certificates differ")]
    MiddleMismatch,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("projector for vertex {vertex} has rank {found}, expected {expected}")]
    RankMismatch { vertex: usize, expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub condition: String,
    /// Vertex tuple of the worst offence, meaning depends on `condition`.
    pub location: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub tol: f64,
    pub max_violation: f64,
    pub worst: Option<Violation>,
}

impl VerifyReport {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            valid: true,
            tol,
            max_violation: 0.0,
            worst: None,
        }
    }

    pub(crate) fn record(&mut self, condition: &str, location: &[usize], magnitude: f64) {
        let magnitude = if magnitude.is_nan() { f64::INFINITY } else { magnitude };
        if magnitude > self.max_violation {
            self.max_violation = magnitude;
            if magnitude > self.tol {
                self.worst = Some(Violation {
                    condition: condition.into(),
                    location: location.to_vec(),
                    magnitude,
                });
            }
        }
        if magnitude > self.tol {
            self.valid = false;
        }
    }
}

fn check_family(name: &str, family: &[Vec<CMatrix>], ng: usize, nh: usize, d: usize) -> Result<(), QuantumError> {
    if family.len() != ng || family.iter().any(|row| row.len() != nh) {
        return Err(QuantumError::Shape(format!("{name} must be {ng}x{nh} operators")));
    }
    if family.iter().flatten().any(|m| m.rows() != d || m.cols() != d) {
        return Err(QuantumError::Shape(format!("{name} operators must be {d}x{d}")));
    }
    Ok(())
}

/// Checks the orthogonality condition of both certificate kinds.
fn check_orthogonality(report: &mut VerifyReport, g: &Graph, h: &Graph, ops: &[Vec<CMatrix>]) {
    let zero: Vec<Vec<bool>> = ops.iter().map(|row| row.iter().map(|m| m.max_abs() == 0.0).collect()).collect();
    for a in 0..g.n() {
        for b in 0..g.n() {
            if a == b || g.has_edge(a, b) {
                continue;
            }
            for x in 0..h.n() {
                if zero[a][x] {
                    continue;
                }
                for y in 0..h.n() {
                    if zero[b][y] || !h.equal_or_adjacent(x, y) {
                        continue;
                    }
                    let p = &ops[a][x] * &ops[b][y];
                    report.record("orthogonality", &[a, b, x, y], p.max_abs());
                }
            }
        }
    }
}

/// Σ_h E_g^h E_g^{h'} over h ≠ h': implied by projectivity and the row sums.
fn implied_orthogonality(ops: &[Vec<CMatrix>]) -> f64 {
    let mut worst: f64 = 0.0;
    for row in ops {
        for (x, ex) in row.iter().enumerate() {
            for ey in row.iter().skip(x + 1) {
                worst = worst.max((ex * ey).max_abs());
            }
        }
    }
    worst
}

/// Projector-valued witness of `source ≤_q target`.
#[derive(Clone, Debug, PartialEq)]
pub struct QHomCert {
    pub source: Graph,
    pub target: Graph,
    pub d: usize,
    /// `e[g][h]` is E_g^h.
    pub e: Vec<Vec<CMatrix>>,
}

impl QHomCert {
    /// Lift of a classical homomorphism `f: complement(source) → complement(target)`.
    pub fn from_classical(source: &Graph, target: &Graph, f: &[usize]) -> Result<Self, QuantumError> {
        if f.len() != source.n() || f.iter().any(|&x| x >= target.n()) {
            return Err(QuantumError::Shape("map does not fit the graphs".into()));
        }
        let e = f
            .iter()
            .map(|&fg| (0..target.n()).map(|h| CMatrix::from_real(1, 1, &[f64::from(u8::from(h == fg))]).unwrap()).collect())
            .collect();
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            d: 1,
            e,
        })
    }

    pub fn verify(&self, tol: f64) -> Result<VerifyReport, QuantumError> {
        check_family("E", &self.e, self.source.n(), self.target.n(), self.d)?;
        let mut report = VerifyReport::new(tol);
        let id = CMatrix::identity(self.d);
        for (g, row) in self.e.iter().enumerate() {
            for (h, m) in row.iter().enumerate() {
                let herm = m.max_abs_diff(&m.adjoint());
                let idem = (m * m).max_abs_diff(m);
                report.record("projector", &[g, h], herm.max(idem));
            }
            let sum = crate::linalg::complex::sum_all(row, self.d, self.d);
            report.record("row-sum", &[g], sum.max_abs_diff(&id));
        }
        check_orthogonality(&mut report, &self.source, &self.target, &self.e);
        if report.valid {
            debug_assert!(implied_orthogonality(&self.e) <= 10.0 * tol.max(1e-12), "implied orthogonality");
        }
        Ok(report)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.verify(tol).is_ok_and(|r| r.valid)
    }

    /// The same family read as an assisted certificate with ρ = I.
    pub fn to_ea(&self) -> EaHomCert {
        EaHomCert {
            source: self.source.clone(),
            target: self.target.clone(),
            d: self.d,
            rho: CMatrix::identity(self.d),
            rhos: self.e.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "qhom",
            "source": self.source,
            "target": self.target,
            "d": self.d,
            "data": family_json(&self.e),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, QuantumError> {
        Ok(Self {
            source: graph_field(v, "source")?,
            target: graph_field(v, "target")?,
            d: usize_field(v, "d")?,
            e: parse_family(&v["data"], "data")?,
        })
    }
}

/// PSD-operator witness of `source ≤_* target` with shared state ρ.
#[derive(Clone, Debug, PartialEq)]
pub struct EaHomCert {
    pub source: Graph,
    pub target: Graph,
    pub d: usize,
    pub rho: CMatrix,
    /// `rhos[g][h]` is ρ_g^h.
    pub rhos: Vec<Vec<CMatrix>>,
}

impl EaHomCert {
    pub fn verify(&self, tol: f64) -> Result<VerifyReport, QuantumError> {
        check_family("rhos", &self.rhos, self.source.n(), self.target.n(), self.d)?;
        if self.rho.rows() != self.d || self.rho.cols() != self.d {
            return Err(QuantumError::Shape(format!("rho must be {0}x{0}", self.d)));
        }
        let mut report = VerifyReport::new(tol);
        let herm = self.rho.max_abs_diff(&self.rho.adjoint());
        let min = self.rho.min_eigenvalue()?;
        // positive definite: smallest eigenvalue must exceed tol
        let defect = if min > tol { 0.0 } else { 2.0 * tol - min + f64::EPSILON };
        report.record("rho-definite", &[], herm.max(defect));
        for (g, row) in self.rhos.iter().enumerate() {
            for (h, m) in row.iter().enumerate() {
                let herm = m.max_abs_diff(&m.adjoint());
                let neg = (-m.min_eigenvalue()?).max(0.0);
                report.record("psd", &[g, h], herm.max(neg));
            }
            let sum = crate::linalg::complex::sum_all(row, self.d, self.d);
            report.record("row-sum", &[g], sum.max_abs_diff(&self.rho));
        }
        check_orthogonality(&mut report, &self.source, &self.target, &self.rhos);
        Ok(report)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.verify(tol).is_ok_and(|r| r.valid)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "eahom",
            "source": self.source,
            "target": self.target,
            "d": self.d,
            "rho": wire::matrix_json(&self.rho),
            "data": family_json(&self.rhos),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, QuantumError> {
        Ok(Self {
            source: graph_field(v, "source")?,
            target: graph_field(v, "target")?,
            d: usize_field(v, "d")?,
            rho: wire::parse_matrix(&v["rho"], "rho")?,
            rhos: parse_family(&v["data"], "data")?,
        })
    }
}

fn family_json(f: &[Vec<CMatrix>]) -> Value {
    Value::Array(f.iter().map(|row| Value::Array(row.iter().map(wire::matrix_json).collect())).collect())
}

fn parse_family(v: &Value, field: &str) -> Result<Vec<Vec<CMatrix>>, QuantumError> {
    v.as_array()
        .ok_or_else(|| WireError::Field(field.into()))?
        .iter()
        .map(|row| wire::parse_matrix_list(row, field).map_err(Into::into))
        .collect()
}

pub(crate) fn graph_field(v: &Value, field: &str) -> Result<Graph, WireError> {
    serde_json::from_value(v[field].clone()).map_err(|e| WireError::Json(format!("{field}: {e}")))
}

pub(crate) fn usize_field(v: &Value, field: &str) -> Result<usize, WireError> {
    v[field].as_u64().map(|x| x as usize).ok_or_else(|| WireError::Field(field.into()))
}

/// R(E) on every operator; dimension doubles, validity is preserved.
pub fn realify_qhom(cert: &QHomCert) -> Result<QHomCert, QuantumError> {
    require_valid(cert.verify(USER_TOL)?)?;
    Ok(QHomCert {
        source: cert.source.clone(),
        target: cert.target.clone(),
        d: 2 * cert.d,
        e: cert.e.iter().map(|row| row.iter().map(CMatrix::realify).collect()).collect(),
    })
}

fn require_valid(report: VerifyReport) -> Result<(), QuantumError> {
    if report.valid {
        Ok(())
    } else {
        let what = report.worst.map_or_else(String::new, |w| w.condition);
        Err(QuantumError::InvalidInput(what))
    }
}

/// Operator families shared by both flavours of the combinators.
fn union_family(
    f1: &[Vec<CMatrix>],
    f2: &[Vec<CMatrix>],
    (d1, d2): (usize, usize),
    (left1, left2): (&CMatrix, &CMatrix),
) -> Vec<Vec<CMatrix>> {
    let (n1, m1) = (f1.len(), f1.first().map_or(0, Vec::len));
    let (n2, m2) = (f2.len(), f2.first().map_or(0, Vec::len));
    let zero = CMatrix::zeros(d1 * d2, d1 * d2);
    let mut out = vec![vec![zero; m1 + m2]; n1 + n2];
    for g in 0..n1 {
        for h in 0..m1 {
            out[g][h] = f1[g][h].kron(left2);
        }
    }
    for k in 0..n2 {
        for l in 0..m2 {
            out[n1 + k][m1 + l] = left1.kron(&f2[k][l]);
        }
    }
    out
}

fn product_family(f1: &[Vec<CMatrix>], f2: &[Vec<CMatrix>], m1: usize, m2: usize) -> Vec<Vec<CMatrix>> {
    let mut out = Vec::with_capacity(f1.len() * f2.len());
    for row1 in f1 {
        for row2 in f2 {
            let mut row = Vec::with_capacity(m1 * m2);
            for a in row1 {
                for b in row2 {
                    row.push(a.kron(b));
                }
            }
            out.push(row);
        }
    }
    out
}

fn compose_family(f1: &[Vec<CMatrix>], f2: &[Vec<CMatrix>], d: usize) -> Vec<Vec<CMatrix>> {
    let nl = f2.first().map_or(0, Vec::len);
    f1.iter()
        .map(|row| {
            (0..nl)
                .map(|l| {
                    row.iter()
                        .zip(f2)
                        .fold(CMatrix::zeros(d, d), |acc, (e, frow)| &acc + &e.kron(&frow[l]))
                })
                .collect()
        })
        .collect()
}

/// `G ≤_q H` and `K ≤_q L` give `G ⊔ K ≤_q H ⊔ L`.
pub fn combine_union(c1: &QHomCert, c2: &QHomCert) -> Result<QHomCert, QuantumError> {
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    let e = union_family(&c1.e, &c2.e, (c1.d, c2.d), (&CMatrix::identity(c1.d), &CMatrix::identity(c2.d)));
    Ok(QHomCert {
        source: c1.source.disjoint_union(&c2.source),
        target: c1.target.disjoint_union(&c2.target),
        d: c1.d * c2.d,
        e,
    })
}

/// `G ≤_q H` and `K ≤_q L` give `G ⊠ K ≤_q H ⊠ L`.
pub fn combine_product(c1: &QHomCert, c2: &QHomCert) -> Result<QHomCert, QuantumError> {
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    Ok(QHomCert {
        source: c1.source.strong_product(&c2.source),
        target: c1.target.strong_product(&c2.target),
        d: c1.d * c2.d,
        e: product_family(&c1.e, &c2.e, c1.target.n(), c2.target.n()),
    })
}

/// `G ≤_q H` and `H ≤_q L` give `G ≤_q L`.
pub fn compose_transitive(c1: &QHomCert, c2: &QHomCert) -> Result<QHomCert, QuantumError> {
    if c1.target != c2.source {
        return Err(QuantumError::MiddleMismatch);
    }
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    let d = c1.d * c2.d;
    Ok(QHomCert {
        source: c1.source.clone(),
        target: c2.target.clone(),
        d,
        e: compose_family(&c1.e, &c2.e, d),
    })
}

pub fn combine_union_ea(c1: &EaHomCert, c2: &EaHomCert) -> Result<EaHomCert, QuantumError> {
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    Ok(EaHomCert {
        source: c1.source.disjoint_union(&c2.source),
        target: c1.target.disjoint_union(&c2.target),
        d: c1.d * c2.d,
        rho: c1.rho.kron(&c2.rho),
        rhos: union_family(&c1.rhos, &c2.rhos, (c1.d, c2.d), (&c1.rho, &c2.rho)),
    })
}

pub fn combine_product_ea(c1: &EaHomCert, c2: &EaHomCert) -> Result<EaHomCert, QuantumError> {
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    Ok(EaHomCert {
        source: c1.source.strong_product(&c2.source),
        target: c1.target.strong_product(&c2.target),
        d: c1.d * c2.d,
        rho: c1.rho.kron(&c2.rho),
        rhos: product_family(&c1.rhos, &c2.rhos, c1.target.n(), c2.target.n()),
    })
}

/// τ_g^l = Σ_h ρ_g^h ⊗ σ_h^l with shared state ρ ⊗ σ.
pub fn compose_transitive_ea(c1: &EaHomCert, c2: &EaHomCert) -> Result<EaHomCert, QuantumError> {
    if c1.target != c2.source {
        return Err(QuantumError::MiddleMismatch);
    }
    require_valid(c1.verify(USER_TOL)?)?;
    require_valid(c2.verify(USER_TOL)?)?;
    let d = c1.d * c2.d;
    Ok(EaHomCert {
        source: c1.source.clone(),
        target: c2.target.clone(),
        d,
        rho: c1.rho.kron(&c2.rho),
        rhos: compose_family(&c1.rhos, &c2.rhos, d),
    })
}

/// Direct sum of the classical lifts of `maps` (each a homomorphism
/// complement(source) → complement(target)), conjugated by a random unitary.
pub fn random_qhom<R: Rng + ?Sized>(source: &Graph, target: &Graph, maps: &[Vec<usize>], rng: &mut R) -> QHomCert {
    let d = maps.len();
    let u = CMatrix::random_unitary(d, rng);
    let e = (0..source.n())
        .map(|g| {
            (0..target.n())
                .map(|h| {
                    let diag: Vec<f64> = maps.iter().map(|f| f64::from(u8::from(f[g] == h))).collect();
                    &(&u * &CMatrix::diag_real(&diag)) * &u.adjoint()
                })
                .collect()
        })
        .collect();
    QHomCert {
        source: source.clone(),
        target: target.clone(),
        d,
        e,
    }
}

/// Like [`random_qhom`] with random positive weights, giving an assisted
/// certificate whose ρ is not a multiple of the identity.
pub fn random_eahom<R: Rng + ?Sized>(source: &Graph, target: &Graph, maps: &[Vec<usize>], rng: &mut R) -> EaHomCert {
    let d = maps.len();
    let u = CMatrix::random_unitary(d, rng);
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
    let conj = |diag: &[f64]| &(&u * &CMatrix::diag_real(diag)) * &u.adjoint();
    let rhos = (0..source.n())
        .map(|g| {
            (0..target.n())
                .map(|h| {
                    let diag: Vec<f64> = maps.iter().zip(&w).map(|(f, &wi)| if f[g] == h { wi } else { 0.0 }).collect();
                    conj(&diag)
                })
                .collect()
        })
        .collect();
    EaHomCert {
        source: source.clone(),
        target: target.clone(),
        d,
        rho: conj(&w),
        rhos,
    }
}

/// Unit vectors with u_g ⊥ u_g' for distinct non-adjacent g, g' of `graph`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthRep {
    pub graph: Graph,
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl OrthRep {
    pub fn verify(&self, tol: f64) -> bool {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        self.vectors.len() == self.graph.n()
            && self.vectors.iter().all(|v| v.len() == self.dim && (dot(v, v) - 1.0).abs() <= tol)
            && (0..self.graph.n()).all(|a| {
                (0..self.graph.n())
                    .all(|b| a == b || self.graph.has_edge(a, b) || dot(&self.vectors[a], &self.vectors[b]).abs() <= tol)
            })
    }

    fn projector(&self, g: usize) -> CMatrix {
        let u: Vec<C64> = self.vectors[g].iter().map(|&x| C64::new(x, 0.0)).collect();
        CMatrix::outer(&u, &u)
    }
}

/// From M disjoint cliques of `orth.graph` (= complement of G) whose vectors
/// resolve the identity, the certificate for K̄_M ≤_q G with
/// E_i^g = u_g u_g^T for g in clique i.
pub fn observation_cert(orth: &OrthRep, cliques: &[Vec<usize>], tol: f64) -> Result<QHomCert, QuantumError> {
    if !orth.verify(tol) {
        return Err(QuantumError::Precondition("not an orthonormal representation".into()));
    }
    let n = orth.graph.n();
    let mut owner = vec![None; n];
    for (i, c) in cliques.iter().enumerate() {
        if c.len() != orth.dim {
            return Err(QuantumError::Precondition(format!("clique {i} does not have {} vertices", orth.dim)));
        }
        if !orth.graph.is_clique(c) {
            return Err(QuantumError::Precondition(format!("set {i} is not a clique")));
        }
        for &g in c {
            if g >= n || owner[g].replace(i).is_some() {
                return Err(QuantumError::Precondition("cliques overlap".into()));
            }
        }
        let sum = c.iter().fold(CMatrix::zeros(orth.dim, orth.dim), |acc, &g| &acc + &orth.projector(g));
        if !sum.approx_eq(&CMatrix::identity(orth.dim), tol) {
            return Err(QuantumError::Precondition(format!("clique {i} does not resolve the identity")));
        }
    }
    let e = (0..cliques.len())
        .map(|i| {
            (0..n)
                .map(|g| if owner[g] == Some(i) { orth.projector(g) } else { CMatrix::zeros(orth.dim, orth.dim) })
                .collect()
        })
        .collect();
    Ok(QHomCert {
        source: Graph::empty(cliques.len()),
        target: orth.graph.complement(),
        d: orth.dim,
        e,
    })
}

/// Rank-r projectors E_g on C^d with E_g E_g' = 0 on edges of `graph`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjRep {
    pub graph: Graph,
    pub d: usize,
    pub r: usize,
    pub projectors: Vec<CMatrix>,
}

impl ProjRep {
    pub fn realify(&self) -> Self {
        Self {
            graph: self.graph.clone(),
            d: 2 * self.d,
            r: 2 * self.r,
            projectors: self.projectors.iter().map(CMatrix::realify).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "projrep",
            "graph": self.graph,
            "d": self.d,
            "r": self.r,
            "data": self.projectors.iter().map(wire::matrix_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, QuantumError> {
        Ok(Self {
            graph: graph_field(v, "graph")?,
            d: usize_field(v, "d")?,
            r: usize_field(v, "r")?,
            projectors: wire::parse_matrix_list(&v["data"], "data")?,
        })
    }
}

/// Validity report plus the certified bound d/r.
pub fn verify_projrank(rep: &ProjRep, tol: f64) -> Result<(VerifyReport, f64), QuantumError> {
    if rep.projectors.len() != rep.graph.n() || rep.projectors.iter().any(|p| p.rows() != rep.d || p.cols() != rep.d) {
        return Err(QuantumError::Shape(format!("need {} projectors of size {}", rep.graph.n(), rep.d)));
    }
    if rep.r == 0 {
        return Err(QuantumError::Shape("r must be positive".into()));
    }
    let mut report = VerifyReport::new(tol);
    for (g, p) in rep.projectors.iter().enumerate() {
        let herm = p.max_abs_diff(&p.adjoint());
        let idem = (p * p).max_abs_diff(p);
        report.record("projector", &[g], herm.max(idem));
        // trace of a projector is its rank
        let found = p.trace().re.round().max(0.0) as usize;
        if found != rep.r {
            return Err(QuantumError::RankMismatch {
                vertex: g,
                expected: rep.r,
                found,
            });
        }
    }
    for (a, b) in rep.graph.edges() {
        report.record("orthogonality", &[a, b], (&rep.projectors[a] * &rep.projectors[b]).max_abs());
    }
    Ok((report, rep.d as f64 / rep.r as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{cohom_leq, Decision, SearchBudget};
    use crate::sdp::theta_value;
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    const TOL: f64 = 1e-9;

    fn classical(g: &Graph, h: &Graph) -> QHomCert {
        let Decision::Yes(f) = cohom_leq(g, h, SearchBudget::default()) else {
            panic!("expected g <= h");
        };
        QHomCert::from_classical(g, h, &f).unwrap()
    }

    /// All homomorphisms complement(g) → complement(h), by brute force.
    fn all_cohoms(g: &Graph, h: &Graph) -> Vec<Vec<usize>> {
        let (gc, hc) = (g.complement(), h.complement());
        let total = h.n().pow(g.n() as u32);
        (0..total)
            .map(|mut code| {
                (0..g.n())
                    .map(|_| {
                        let x = code % h.n();
                        code /= h.n();
                        x
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|f| crate::combinatorics::is_homomorphism(&gc, &hc, f))
            .collect()
    }

    fn two_bases() -> OrthRep {
        let (c, s) = (0.6f64, 0.8f64);
        let vectors = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![c, s, 0.0],
            vec![-s, c, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut edges = Vec::new();
        for a in 0..6 {
            for b in (a + 1)..6 {
                if a / 3 == b / 3 || dot(&vectors[a], &vectors[b]).abs() > 1e-12 {
                    edges.push((a, b));
                }
            }
        }
        OrthRep {
            graph: Graph::from_edges(6, &edges).unwrap(),
            dim: 3,
            vectors,
        }
    }

    #[test]
    fn classical_lift_and_deletion() {
        let c5 = Graph::cycle(5).unwrap();
        let cert = classical(&c5, &Graph::empty(3));
        assert!(cert.verify(TOL).unwrap().valid);
        assert!(cert.to_ea().verify(TOL).unwrap().valid);
        let mut broken = cert.clone();
        let (g, h) = (0, (0..3).find(|&h| broken.e[0][h][(0, 0)].re == 1.0).unwrap());
        broken.e[g][h] = CMatrix::zeros(1, 1);
        let report = broken.verify(TOL).unwrap();
        assert!(!report.valid);
        assert_eq!(report.worst.unwrap().condition, "row-sum");
    }

    #[test]
    fn verifier_rejects_bad_maps() {
        // K̄_3 ≤ K̄_2 is false: every map of K_3 into K_2 collides somewhere
        let bad = QHomCert::from_classical(&Graph::empty(3), &Graph::empty(2), &[0, 1, 0]).unwrap();
        let report = bad.verify(TOL).unwrap();
        assert!(!report.valid);
        assert_eq!(report.worst.unwrap().condition, "orthogonality");
        let mut shape = bad.clone();
        shape.e.pop();
        assert!(shape.verify(TOL).is_err());
    }

    #[test]
    fn ea_requires_definite_rho() {
        let c5 = Graph::cycle(5).unwrap();
        let mut ea = classical(&c5, &Graph::empty(3)).to_ea();
        assert!(ea.verify(TOL).unwrap().valid);
        ea.rho = CMatrix::zeros(1, 1);
        for row in &mut ea.rhos {
            for m in row {
                *m = CMatrix::zeros(1, 1);
            }
        }
        let r = ea.verify(TOL).unwrap();
        assert!(!r.valid);
        assert_eq!(r.worst.unwrap().condition, "rho-definite");
    }

    #[test]
    fn observation_two_bases() {
        let orth = two_bases();
        assert!(orth.verify(1e-12));
        let cert = observation_cert(&orth, &[vec![0, 1, 2], vec![3, 4, 5]], TOL).unwrap();
        assert_eq!(cert.source, Graph::empty(2));
        assert!(cert.verify(TOL).unwrap().valid);
        assert!(matches!(
            observation_cert(&orth, &[vec![0, 1, 2], vec![2, 3, 4]], TOL),
            Err(QuantumError::Precondition(_))
        ));
        // single clique on K_d with the standard basis
        let std = OrthRep {
            graph: Graph::complete(3),
            dim: 3,
            vectors: (0..3).map(|i| (0..3).map(|j| f64::from(u8::from(i == j))).collect()).collect(),
        };
        let one = observation_cert(&std, &[vec![0, 1, 2]], TOL).unwrap();
        assert!(one.verify(TOL).unwrap().valid);
    }

    #[test]
    fn realify_keeps_validity() {
        let mut rng = SplitMix64::seed_from_u64(1);
        let g = Graph::cycle(5).unwrap();
        let h = Graph::empty(3);
        let maps = all_cohoms(&g, &h);
        for k in 1..4 {
            let cert = random_qhom(&g, &h, &maps[..k], &mut rng);
            assert!(cert.verify(TOL).unwrap().valid);
            let real = realify_qhom(&cert).unwrap();
            assert_eq!(real.d, 2 * k);
            assert!(real.verify(TOL).unwrap().valid);
            assert!(real.e.iter().flatten().all(|m| m.is_real_within(0.0)));
        }
        let cls = classical(&g, &h);
        let real = realify_qhom(&cls).unwrap();
        assert!(real.verify(TOL).unwrap().valid);
    }

    #[test]
    fn combinators_on_random_pairs() {
        let mut rng = SplitMix64::seed_from_u64(2);
        let mut checked = 0;
        while checked < 8 {
            let g = Graph::random(rng.random_range(1..5), 0.5, &mut rng);
            let h = Graph::random(rng.random_range(1..5), 0.5, &mut rng);
            let l = Graph::random(rng.random_range(1..4), 0.5, &mut rng);
            let gh = all_cohoms(&g, &h);
            let hl = all_cohoms(&h, &l);
            if gh.is_empty() || hl.is_empty() {
                continue;
            }
            checked += 1;
            let c1 = random_qhom(&g, &h, &gh[..gh.len().min(2)], &mut rng);
            let c2 = random_qhom(&h, &l, &hl[..hl.len().min(2)], &mut rng);
            for out in [combine_union(&c1, &c2).unwrap(), combine_product(&c1, &c2).unwrap(), compose_transitive(&c1, &c2).unwrap()] {
                assert_eq!(out.d, c1.d * c2.d);
                assert!(out.verify(TOL).unwrap().valid);
            }
            let e1 = random_eahom(&g, &h, &gh[..gh.len().min(2)], &mut rng);
            let e2 = random_eahom(&h, &l, &hl[..hl.len().min(2)], &mut rng);
            for out in [
                combine_union_ea(&e1, &e2).unwrap(),
                combine_product_ea(&e1, &e2).unwrap(),
                compose_transitive_ea(&e1, &e2).unwrap(),
            ] {
                assert!(out.verify(TOL).unwrap().valid);
            }
        }
        let c = classical(&Graph::cycle(5).unwrap(), &Graph::empty(3));
        assert_eq!(compose_transitive(&c, &c), Err(QuantumError::MiddleMismatch));
    }

    #[test]
    fn classical_composition_is_function_composition() {
        let c5 = Graph::cycle(5).unwrap();
        let a = classical(&c5, &Graph::empty(3));
        let b = QHomCert::from_classical(&Graph::empty(3), &Graph::empty(4), &[2, 0, 3]).unwrap();
        let ab = compose_transitive(&a, &b).unwrap();
        for g in 0..5 {
            let fg = (0..3).find(|&h| a.e[g][h][(0, 0)].re == 1.0).unwrap();
            let expected = [2, 0, 3][fg];
            for l in 0..4 {
                assert_eq!(ab.e[g][l][(0, 0)].re, f64::from(u8::from(l == expected)));
            }
        }
    }

    #[test]
    fn product_of_observations_witnesses_more() {
        let obs = observation_cert(&two_bases(), &[vec![0, 1, 2], vec![3, 4, 5]], TOL).unwrap();
        let p = combine_product(&obs, &obs).unwrap();
        assert_eq!(p.source, Graph::empty(2).strong_product(&Graph::empty(2)));
        assert_eq!(p.d, 9);
        assert!(p.verify(TOL).unwrap().valid);
    }

    #[test]
    fn theta_respects_certified_pairs() {
        let obs = observation_cert(&two_bases(), &[vec![0, 1, 2], vec![3, 4, 5]], TOL).unwrap();
        assert!(theta_value(&obs.source).unwrap() <= theta_value(&obs.target).unwrap() + 1e-6);
        let c = classical(&Graph::cycle(5).unwrap(), &Graph::empty(3));
        assert!(theta_value(&c.source).unwrap() <= theta_value(&c.target).unwrap() + 1e-6);
    }

    #[test]
    fn projrank_examples() {
        let n = 4;
        let basis: Vec<CMatrix> = (0..n).map(|g| CMatrix::unit(n, n, g, g)).collect();
        let rep = ProjRep {
            graph: Graph::complete(n),
            d: n,
            r: 1,
            projectors: basis,
        };
        let (report, bound) = verify_projrank(&rep, TOL).unwrap();
        assert!(report.valid);
        assert_eq!(bound, 4.0);

        let u = CMatrix::random_unitary(n, &mut SplitMix64::seed_from_u64(3));
        let conj = ProjRep {
            projectors: rep.projectors.iter().map(|p| &(&u * p) * &u.adjoint()).collect(),
            ..rep.clone()
        };
        assert!(verify_projrank(&conj, TOL).unwrap().0.valid);

        let real = conj.realify();
        let (report, bound) = verify_projrank(&real, TOL).unwrap();
        assert!(report.valid);
        assert_eq!((real.d, real.r, bound), (8, 2, 4.0));

        let wrong = ProjRep { r: 2, ..rep };
        assert!(matches!(verify_projrank(&wrong, TOL), Err(QuantumError::RankMismatch { .. })));
    }

    #[test]
    fn json_round_trips() {
        let mut rng = SplitMix64::seed_from_u64(4);
        let g = Graph::cycle(5).unwrap();
        let h = Graph::empty(3);
        let maps = all_cohoms(&g, &h);
        let q = random_qhom(&g, &h, &maps[..2], &mut rng);
        assert_eq!(QHomCert::from_json(&q.to_json()).unwrap(), q);
        let e = random_eahom(&g, &h, &maps[..2], &mut rng);
        assert_eq!(EaHomCert::from_json(&e.to_json()).unwrap(), e);
    }
}
