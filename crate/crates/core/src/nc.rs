//! Non-commutative graphs: operator subspaces `S ⊆ L(C^n)` with `S = S†`
//! and `I ∈ S`, their semiring operations and cohomomorphism certificates.

use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::complex::{sum_all, vec_inner, vec_norm};
use crate::linalg::{CMatrix, MatrixError, C64};
use crate::quantum::{graph_field, EaHomCert, QuantumError, VerifyReport};
use crate::wire::{self, WireError};

/// Relative threshold below which a Gram–Schmidt residual counts as zero.
pub const DROP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("cannot embed K̄_{m} into K̄_{n}")]
    NoEmbedding { m: usize, n: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Operator subspace with a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NcGraph {
    pub dim: usize,
    pub basis: Vec<CMatrix>,
    /// Set when the space is S_G for this graph.
    pub provenance: Option<Graph>,
}

fn flatten(m: &CMatrix) -> Vec<C64> {
    m.data().to_vec()
}

fn unflatten(v: Vec<C64>, n: usize) -> CMatrix {
    CMatrix::from_vec(n, n, v).expect("n*n entries")
}

/// Extends the orthonormal list `basis` by the part of `v` outside its span,
/// with one re-orthogonalisation pass. Returns whether `v` was kept.
fn extend_basis(basis: &mut Vec<Vec<C64>>, v: &[C64]) -> bool {
    let norm0 = vec_norm(v);
    if norm0 == 0.0 {
        return false;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis.iter() {
            let c = vec_inner(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    let norm = vec_norm(&w);
    if norm <= DROP_TOL * norm0 {
        return false;
    }
    basis.push(w.into_iter().map(|z| z / norm).collect());
    true
}

/// ‖X − P_S X‖_F for an orthonormal basis.
fn residual(basis: &[CMatrix], x: &CMatrix) -> f64 {
    let mut w = flatten(x);
    for q in basis {
        let c = q.hs_inner(x);
        for (wi, qi) in w.iter_mut().zip(q.data()) {
            *wi -= c * qi;
        }
    }
    vec_norm(&w)
}

impl NcGraph {
    /// Span of `gens`, their adjoints and the identity.
    pub fn from_generators(dim: usize, gens: &[CMatrix]) -> Result<Self, NcError> {
        if let Some(g) = gens.iter().find(|g| g.rows() != dim || g.cols() != dim) {
            return Err(NcError::Shape(format!("generator is {}x{}, expected {dim}x{dim}", g.rows(), g.cols())));
        }
        let mut basis = Vec::new();
        if dim > 0 {
            extend_basis(&mut basis, &flatten(&CMatrix::identity(dim)));
        }
        for g in gens {
            extend_basis(&mut basis, &flatten(g));
            extend_basis(&mut basis, &flatten(&g.adjoint()));
        }
        Ok(Self {
            dim,
            basis: basis.into_iter().map(|v| unflatten(v, dim)).collect(),
            provenance: None,
        })
    }

    /// S_G = span{|g⟩⟨g'| : g = g' or g ~ g'}.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut basis = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if g.equal_or_adjacent(a, b) {
                    basis.push(CMatrix::unit(n, n, a, b));
                }
            }
        }
        Self {
            dim: n,
            basis,
            provenance: Some(g.clone()),
        }
    }

    /// span{I_n}.
    pub fn identity_span(n: usize) -> Self {
        Self::from_generators(n, &[]).expect("no generators")
    }

    /// Confusability space span{N_m† N_n} of a channel.
    pub fn of_channel(channel: &ChannelSpec) -> Result<Self, NcError> {
        let k = &channel.kraus;
        let gens: Vec<CMatrix> = k.iter().flat_map(|a| k.iter().map(move |b| &a.adjoint() * b)).collect();
        Self::from_generators(channel.in_dim(), &gens)
    }

    /// Linear dimension of the subspace.
    pub fn subspace_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn residual(&self, x: &CMatrix) -> f64 {
        residual(&self.basis, x)
    }

    pub fn contains(&self, x: &CMatrix, tol: f64) -> bool {
        self.residual(x) <= tol * x.frobenius_norm().max(1.0)
    }

    /// Orthonormality, `I ∈ S` and closure under adjoints, within `tol`.
    pub fn check_invariants(&self, tol: f64) -> bool {
        let orthonormal = self.basis.iter().enumerate().all(|(i, a)| {
            self.basis
                .iter()
                .enumerate()
                .all(|(j, b)| (a.hs_inner(b) - if i == j { 1.0 } else { 0.0 }).norm() <= tol)
        });
        let has_identity = self.dim == 0 || self.contains(&CMatrix::identity(self.dim), tol);
        let self_adjoint = self.basis.iter().all(|b| self.contains(&b.adjoint(), tol));
        orthonormal && has_identity && self_adjoint
    }

    pub fn span_eq(&self, other: &NcGraph, tol: f64) -> bool {
        self.dim == other.dim
            && self.subspace_dim() == other.subspace_dim()
            && self.basis.iter().all(|b| other.residual(b) <= tol)
            && other.basis.iter().all(|b| self.residual(b) <= tol)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "basis": self.basis.iter().map(wire::matrix_json).collect::<Vec<_>>(),
            "provenance": self.provenance,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, NcError> {
        let dim = v["dim"].as_u64().ok_or_else(|| WireError::Field("dim".into()))? as usize;
        let basis = wire::parse_matrix_list(&v["basis"], "basis")?;
        if basis.iter().any(|b| b.rows() != dim || b.cols() != dim) {
            return Err(NcError::Shape("basis element has the wrong size".into()));
        }
        let provenance = if v["provenance"].is_null() {
            None
        } else {
            Some(graph_field(v, "provenance")?)
        };
        Ok(Self { dim, basis, provenance })
    }
}

/// Orthonormal basis of S^⊥ under Tr(X†Y).
pub fn nc_perp(s: &NcGraph) -> Vec<CMatrix> {
    let n = s.dim;
    let mut all: Vec<Vec<C64>> = s.basis.iter().map(flatten).collect();
    let start = all.len();
    for a in 0..n {
        for b in 0..n {
            if all.len() == n * n {
                break;
            }
            extend_basis(&mut all, &flatten(&CMatrix::unit(n, n, a, b)));
        }
    }
    all.into_iter().skip(start).map(|v| unflatten(v, n)).collect()
}

/// S ⊗ T; pairwise Kronecker products of orthonormal bases stay orthonormal.
pub fn nc_tensor(s: &NcGraph, t: &NcGraph) -> NcGraph {
    let basis = s.basis.iter().flat_map(|a| t.basis.iter().map(move |b| a.kron(b))).collect();
    let provenance = match (&s.provenance, &t.provenance) {
        (Some(g), Some(h)) => Some(g.strong_product(h)),
        _ => None,
    };
    NcGraph {
        dim: s.dim * t.dim,
        basis,
        provenance,
    }
}

/// S ⊕ T ⊆ L(A ⊕ B), block-diagonal embeddings without cross blocks.
pub fn nc_direct_sum(s: &NcGraph, t: &NcGraph) -> NcGraph {
    let basis = s
        .basis
        .iter()
        .map(|a| a.direct_sum(&CMatrix::zeros(t.dim, t.dim)))
        .chain(t.basis.iter().map(|b| CMatrix::zeros(s.dim, s.dim).direct_sum(b)))
        .collect();
    let provenance = match (&s.provenance, &t.provenance) {
        (Some(g), Some(h)) => Some(g.disjoint_union(h)),
        _ => None,
    };
    NcGraph {
        dim: s.dim + t.dim,
        basis,
        provenance,
    }
}

/// Kraus operators with Σ N_i† N_i = I.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub kraus: Vec<CMatrix>,
}

impl ChannelSpec {
    pub fn new(kraus: Vec<CMatrix>, tol: f64) -> Result<Self, NcError> {
        let c = Self { kraus };
        if c.kraus.is_empty() {
            return Err(NcError::Shape("a channel needs at least one Kraus operator".into()));
        }
        let (r, k) = (c.out_dim(), c.in_dim());
        if c.kraus.iter().any(|m| m.rows() != r || m.cols() != k) {
            return Err(NcError::Shape("Kraus operators differ in shape".into()));
        }
        if c.trace_defect() > tol {
            return Err(NcError::Precondition("Kraus operators are not trace preserving".into()));
        }
        Ok(c)
    }

    pub fn in_dim(&self) -> usize {
        self.kraus.first().map_or(0, CMatrix::cols)
    }

    pub fn out_dim(&self) -> usize {
        self.kraus.first().map_or(0, CMatrix::rows)
    }

    /// ‖Σ N†N − I‖_max.
    pub fn trace_defect(&self) -> f64 {
        let k = self.in_dim();
        let sum = self.kraus.iter().fold(CMatrix::zeros(k, k), |acc, m| &acc + &(&m.adjoint() * m));
        sum.max_abs_diff(&CMatrix::identity(k))
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let r = self.out_dim();
        self.kraus.iter().fold(CMatrix::zeros(r, r), |acc, m| &acc + &(&(m * rho) * &m.adjoint()))
    }

    /// Kraus operators of `other ∘ self`.
    pub fn then(&self, other: &ChannelSpec) -> ChannelSpec {
        ChannelSpec {
            kraus: other.kraus.iter().flat_map(|b| self.kraus.iter().map(move |a| b * a)).collect(),
        }
    }

    /// Random channel: Gaussian operators normalised by (Σ G†G)^{-1/2}.
    /// `count` is raised until the sum has full rank.
    pub fn random<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, count: usize, rng: &mut R) -> Self {
        let count = count.max(in_dim.div_ceil(out_dim.max(1)));
        let gs: Vec<CMatrix> = (0..count).map(|_| CMatrix::random_gaussian(out_dim, in_dim, rng)).collect();
        let s = gs.iter().fold(CMatrix::zeros(in_dim, in_dim), |acc, g| &acc + &(&g.adjoint() * g));
        let inv = s.inv_sqrt_pd().expect("Gaussian sum is positive definite");
        ChannelSpec {
            kraus: gs.iter().map(|g| g * &inv).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "kraus": self.kraus.iter().map(wire::matrix_json).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value, tol: f64) -> Result<Self, NcError> {
        Self::new(wire::parse_matrix_list(&v["kraus"], "kraus")?, tol)
    }
}

/// Witness of `source ≤ target` (plain) or `source ≤_* target` (assisted,
/// with `rho` on an ancilla of dimension `rho.rows()`).
#[derive(Clone, Debug, PartialEq)]
pub struct NcCohomCert {
    pub source: NcGraph,
    pub target: NcGraph,
    pub kraus: Vec<CMatrix>,
    pub rho: Option<CMatrix>,
}

impl NcCohomCert {
    fn input_dim(&self) -> usize {
        self.source.dim * self.rho.as_ref().map_or(1, CMatrix::rows)
    }

    /// A valid plain certificate read as an assisted one with ρ = 1.
    pub fn to_assisted(&self) -> Self {
        Self {
            rho: Some(CMatrix::identity(1)),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "nccohom",
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "kraus": self.kraus.iter().map(wire::matrix_json).collect::<Vec<_>>(),
            "rho": self.rho.as_ref().map(wire::matrix_json),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, NcError> {
        Ok(Self {
            source: NcGraph::from_json(&v["source"])?,
            target: NcGraph::from_json(&v["target"])?,
            kraus: wire::parse_matrix_list(&v["kraus"], "kraus")?,
            rho: if v["rho"].is_null() {
                None
            } else {
                Some(wire::parse_matrix(&v["rho"], "rho")?)
            },
        })
    }
}

/// Trace preservation, definiteness of ρ, and E_i (X ⊗ ρ) E_j† ⊥ T for every
/// basis element X of S^⊥.
pub fn verify_nc_cohom(cert: &NcCohomCert, tol: f64) -> Result<VerifyReport, NcError> {
    let (din, dout) = (cert.input_dim(), cert.target.dim);
    if cert.kraus.iter().any(|e| e.rows() != dout || e.cols() != din) {
        return Err(NcError::Shape(format!("Kraus operators must be {dout}x{din}")));
    }
    let mut report = VerifyReport::new(tol);
    if let Some(rho) = &cert.rho {
        if !rho.is_square() {
            return Err(NcError::Shape("rho must be square".into()));
        }
        let herm = rho.max_abs_diff(&rho.adjoint());
        let min = rho.min_eigenvalue()?;
        let defect = if min > tol { 0.0 } else { 2.0 * tol - min + f64::EPSILON };
        report.record("rho-definite", &[], herm.max(defect));
    }
    let sum = sum_all(&cert.kraus.iter().map(|e| &e.adjoint() * e).collect::<Vec<_>>(), din, din);
    report.record("trace-preserving", &[], sum.max_abs_diff(&CMatrix::identity(din)));
    let adj: Vec<CMatrix> = cert.kraus.iter().map(CMatrix::adjoint).collect();
    for (xi, x) in nc_perp(&cert.source).iter().enumerate() {
        let input = match &cert.rho {
            Some(rho) => x.kron(rho),
            None => x.clone(),
        };
        let left: Vec<CMatrix> = cert.kraus.iter().map(|e| e * &input).collect();
        for (i, l) in left.iter().enumerate() {
            if l.max_abs() == 0.0 {
                continue;
            }
            for (j, ej) in adj.iter().enumerate() {
                let m = l * ej;
                for (yi, y) in cert.target.basis.iter().enumerate() {
                    report.record("orthogonality", &[xi, i, j, yi], m.hs_inner(y).norm());
                }
            }
        }
    }
    Ok(report)
}

/// K̄_k ≤ S from states with |ψ_i⟩⟨ψ_j| ⊥ S for i ≠ j, via E_i = |ψ_i⟩⟨i|.
pub fn indep_to_nc_cert(s: &NcGraph, states: &[Vec<C64>], tol: f64) -> Result<NcCohomCert, NcError> {
    let k = states.len();
    for (i, psi) in states.iter().enumerate() {
        if psi.len() != s.dim {
            return Err(NcError::Shape(format!("state {i} has length {}, expected {}", psi.len(), s.dim)));
        }
        if (vec_norm(psi) - 1.0).abs() > tol {
            return Err(NcError::Precondition(format!("state {i} is not a unit vector")));
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let op = CMatrix::outer(&states[i], &states[j]);
            if let Some(y) = s.basis.iter().position(|y| y.hs_inner(&op).norm() > tol) {
                return Err(NcError::Precondition(format!(
                    "|psi_{i}><psi_{j}| is not orthogonal to basis element {y}"
                )));
            }
        }
    }
    let kraus = states
        .iter()
        .enumerate()
        .map(|(i, psi)| {
            let e_i: Vec<C64> = (0..k).map(|j| C64::new(f64::from(u8::from(i == j)), 0.0)).collect();
            CMatrix::outer(psi, &e_i)
        })
        .collect();
    Ok(NcCohomCert {
        source: NcGraph::from_graph(&Graph::empty(k)),
        target: s.clone(),
        kraus,
        rho: None,
    })
}

/// Standard basis vector e_i of C^n.
pub fn basis_state(n: usize, i: usize) -> Vec<C64> {
    (0..n).map(|j| C64::new(f64::from(u8::from(i == j)), 0.0)).collect()
}

/// Plain certificate for K̄_m ≤ K̄_n (m ≤ n) by the isometric embedding.
pub fn embedding_cert(m: usize, n: usize) -> Result<NcCohomCert, NcError> {
    if m > n {
        return Err(NcError::NoEmbedding { m, n });
    }
    let v = CMatrix::from_fn(n, m, |i, j| C64::new(f64::from(u8::from(i == j)), 0.0));
    Ok(NcCohomCert {
        source: NcGraph::from_graph(&Graph::empty(m)),
        target: NcGraph::from_graph(&Graph::empty(n)),
        kraus: vec![v],
        rho: None,
    })
}

/// Purification and POVM reproducing an ensemble: with ρ = Σ ρ_k ≻ 0,
/// `Tr_1((A_k ⊗ I)|Ω⟩⟨Ω|) = ρ_k` and `Σ A_k = I`.
#[derive(Clone, Debug)]
pub struct PovmPurification {
    /// Ω ∈ C^d ⊗ C^d, index `a * d + b`.
    pub omega: Vec<C64>,
    pub povm: Vec<CMatrix>,
}

/// Ω = Σ √λ_i ψ_i* ⊗ ψ_i over the eigenpairs of ρ and
/// A_k = (ρ^T)^{-1/2} ρ_k^T (ρ^T)^{-1/2}.
pub fn povm_from_ensemble(rhos: &[CMatrix], tol: f64) -> Result<PovmPurification, NcError> {
    let d = rhos.first().map_or(0, CMatrix::rows);
    if rhos.iter().any(|r| r.rows() != d || r.cols() != d) {
        return Err(NcError::Shape("ensemble members differ in shape".into()));
    }
    let rho = sum_all(rhos, d, d).with_tol(tol);
    let rho_t_isqrt = rho.transpose().with_tol(tol).inv_sqrt_pd()?;
    let eig = rho.hermitian_eigen();
    let mut omega = vec![C64::new(0.0, 0.0); d * d];
    for (k, &l) in eig.values.iter().enumerate() {
        let psi = eig.vectors.col(k);
        let s = l.max(0.0).sqrt();
        for a in 0..d {
            for b in 0..d {
                omega[a * d + b] += psi[a].conj() * psi[b] * s;
            }
        }
    }
    let povm = rhos.iter().map(|r| &(&rho_t_isqrt * &r.transpose()) * &rho_t_isqrt).collect();
    Ok(PovmPurification { omega, povm })
}

/// Tr over the first tensor factor of an operator on C^{d1} ⊗ C^{d2}.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |b, bp| (0..d1).map(|a| m[(a * d2 + b, a * d2 + bp)]).sum())
}

/// Tr over the second tensor factor of an operator on C^{d1} ⊗ C^{d2}.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, ap| (0..d2).map(|b| m[(a * d2 + b, ap * d2 + b)]).sum())
}

/// Assisted certificate S_G ≤_* S_H from an assisted homomorphism
/// certificate for G ≤_* H. Kraus operators are
/// E_{i,g,h} = |h⟩(⟨g| ⊗ ⟨i| M_g^h) with M_g^h = (A_g^h)^{1/2} from
/// [`povm_from_ensemble`] on each row, and the ancilla state is ρ^T.
pub fn graph_cert_to_nc(cert: &EaHomCert, tol: f64) -> Result<NcCohomCert, NcError> {
    let (ng, nh, d) = (cert.source.n(), cert.target.n(), cert.d);
    if cert.rhos.len() != ng || cert.rhos.iter().any(|r| r.len() != nh) {
        return Err(NcError::Shape("certificate family has the wrong shape".into()));
    }
    if !cert.rho.clone().with_tol(tol).is_positive_definite()? {
        return Err(NcError::Matrix(MatrixError::NotPositiveDefinite(cert.rho.min_eigenvalue()?)));
    }
    let mut kraus = Vec::new();
    for g in 0..ng {
        let povm = povm_from_ensemble(&cert.rhos[g], tol)?.povm;
        for (h, a) in povm.iter().enumerate() {
            let m = a.sqrt_psd();
            if m.max_abs() <= tol * 1e-3 {
                continue;
            }
            for i in 0..d {
                // row i of M as a functional on the ancilla
                let mut e = CMatrix::zeros(nh, ng * d);
                for c in 0..d {
                    e[(h, g * d + c)] = m[(i, c)];
                }
                kraus.push(e);
            }
        }
    }
    Ok(NcCohomCert {
        source: NcGraph::from_graph(&cert.source),
        target: NcGraph::from_graph(&cert.target),
        kraus,
        rho: Some(cert.rho.transpose()),
    })
}

/// The Bell basis of C^n ⊗ C^n and the assisted certificate
/// span{I_n} ≤_* K̄_{n²} built from the Bell measurement.
#[derive(Clone, Debug)]
pub struct BellConstruction {
    pub n: usize,
    /// `states[i * n + j]` is Φ_{i,j}.
    pub states: Vec<Vec<C64>>,
    pub cert: NcCohomCert,
}

/// Φ_{i,j} = n^{-1/2} Σ_k ω^{jk} |i+k⟩|k⟩ (shift by i, clock phase j).
pub fn bell_state(n: usize, i: usize, j: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    let s = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        let phase = std::f64::consts::TAU * (j * k) as f64 / n as f64;
        v[((i + k) % n) * n + k] = C64::from_polar(s, phase);
    }
    v
}

/// Kraus operators E_{i,j} = |i,j⟩⟨Φ_{i,j}| with ρ = I_n.
pub fn bell_kraus(n: usize) -> BellConstruction {
    let states: Vec<Vec<C64>> = (0..n * n).map(|ij| bell_state(n, ij / n, ij % n)).collect();
    let kraus = states
        .iter()
        .enumerate()
        .map(|(ij, phi)| CMatrix::outer(&basis_state(n * n, ij), phi))
        .collect();
    BellConstruction {
        n,
        cert: NcCohomCert {
            source: NcGraph::identity_span(n),
            target: NcGraph::from_graph(&Graph::empty(n * n)),
            kraus,
            rho: Some(CMatrix::identity(n)),
        },
        states,
    }
}

/// Outcome of [`channel_orthogonality_check`]; the two sides are computed
/// independently and always agree in exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalityCheck {
    pub lhs: bool,
    pub rhs: bool,
    /// √Tr(σ_i σ_j) for the two output states.
    pub lhs_magnitude: f64,
    /// Largest |Tr((N_m†N_n)† E_{i,l} τ E_{j,l'}†)|.
    pub rhs_magnitude: f64,
}

/// lhs: the states ((N∘E_i) ⊗ id)(|Ω⟩⟨Ω|) and ((N∘E_j) ⊗ id)(|Ω⟩⟨Ω|) are
/// orthogonal. rhs: span{E_{i,l} τ E_{j,l'}†} ⊥ span{N_m†N_n} with
/// τ = Tr_2 |Ω⟩⟨Ω|. Ω lives on C^{in(E)} ⊗ C^{b}.
pub fn channel_orthogonality_check(
    n: &ChannelSpec,
    ei: &ChannelSpec,
    ej: &ChannelSpec,
    omega: &[C64],
    tol: f64,
) -> Result<OrthogonalityCheck, NcError> {
    let a0 = ei.in_dim();
    if ej.in_dim() != a0 || ei.out_dim() != n.in_dim() || ej.out_dim() != n.in_dim() || a0 == 0 || !omega.len().is_multiple_of(a0) {
        return Err(NcError::Shape("channels and state do not compose".into()));
    }
    let b = omega.len() / a0;
    let proj = CMatrix::outer(omega, omega);
    let id_b = CMatrix::identity(b);
    let output = |e: &ChannelSpec| {
        let total = e.then(n);
        let ext = ChannelSpec {
            kraus: total.kraus.iter().map(|k| k.kron(&id_b)).collect(),
        };
        ext.apply(&proj)
    };
    let (si, sj) = (output(ei), output(ej));
    let overlap = si.hs_inner(&sj).re.max(0.0).sqrt();

    let tau = partial_trace_second(&proj, a0, b);
    let confusable: Vec<CMatrix> = n
        .kraus
        .iter()
        .flat_map(|x| n.kraus.iter().map(move |y| &x.adjoint() * y))
        .collect();
    let mut worst: f64 = 0.0;
    for l in &ei.kraus {
        let lt = l * &tau;
        for lp in &ej.kraus {
            let m = &lt * &lp.adjoint();
            for s in &confusable {
                worst = worst.max(s.hs_inner(&m).norm());
            }
        }
    }
    Ok(OrthogonalityCheck {
        lhs: overlap <= tol,
        rhs: worst <= tol,
        lhs_magnitude: overlap,
        rhs_magnitude: worst,
    })
}

/// A random instance for [`channel_orthogonality_check`] with all dimensions
/// at most 3. With `orthogonal` set, N separates two orthogonal input
/// subspaces and the encoders land in different ones (both sides true);
/// otherwise everything is random.
pub fn random_orthogonality_instance<R: Rng + ?Sized>(
    rng: &mut R,
    orthogonal: bool,
) -> (ChannelSpec, ChannelSpec, ChannelSpec, Vec<C64>) {
    let a0 = rng.random_range(1..=3);
    let b = rng.random_range(1..=3);
    let omega = CMatrix::random_unit_vector(a0 * b, rng);
    if !orthogonal {
        let a = rng.random_range(1..=3);
        let out = rng.random_range(1..=3);
        let n = ChannelSpec::random(a, out, rng.random_range(1..=3), rng);
        let ei = ChannelSpec::random(a0, a, rng.random_range(1..=3), rng);
        let ej = if rng.random_bool(0.2) { ei.clone() } else { ChannelSpec::random(a0, a, rng.random_range(1..=3), rng) };
        return (n, ei, ej, omega);
    }
    // A = C^2 split as span{e0} ⊕ span{e1}, output C^3 split as span{f0} ⊕ span{f1, f2}
    let u = CMatrix::random_unitary(2, rng);
    let count = rng.random_range(1..=3);
    let a: Vec<C64> = CMatrix::random_unit_vector(count, rng);
    let w = CMatrix::random_gaussian(2, count, rng);
    let wn = w.frobenius_norm();
    let kraus = (0..count)
        .map(|m| {
            let mut k = CMatrix::zeros(3, 2);
            k[(0, 0)] = a[m];
            k[(1, 1)] = w[(0, m)] / wn;
            k[(2, 1)] = w[(1, m)] / wn;
            &k * &u.adjoint()
        })
        .collect();
    let n = ChannelSpec { kraus };
    let encoder = |slot: usize, rng: &mut R| {
        let v = CMatrix::random_unitary(a0, rng);
        ChannelSpec {
            kraus: (0..a0)
                .map(|l| {
                    let target = u.col(slot);
                    CMatrix::outer(&target, &v.col(l))
                })
                .collect(),
        }
    };
    let ei = encoder(0, rng);
    let ej = encoder(1, rng);
    (n, ei, ej, omega)
}
