//! d-representations of graphs and the rank upper bounds they certify.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::exact::{format_rational, parse_rational, ExactError, ExactMatrix, FieldTag, Scalar};
use crate::linalg::{CMatrix, C64};
use crate::wire::{self, WireError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HaemersError {
    #[error("representation matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("matrix does not fit the pattern of the graph")]
    InvalidRep,
    #[error("shift must be non-zero")]
    ZeroShift,
    #[error("expected a complex representation")]
    NotComplex,
    #[error("brute-force oracle limited to {0} vertices")]
    TooLarge(usize),
    #[error("representations over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepField {
    Exact(FieldTag),
    Complex,
    /// Real entries stored in a complex matrix, e.g. the output of [`realify_drep`].
    Real,
}

impl RepField {
    pub fn label(&self) -> String {
        match self {
            RepField::Exact(f) => f.label(),
            RepField::Complex => "C".into(),
            RepField::Real => "R".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepMatrix {
    Exact(ExactMatrix),
    Numeric(CMatrix),
}

/// A d-representation: the nd×nd matrix whose (g,g') block is M_{g,g'}.
#[derive(Clone, Debug, PartialEq)]
pub struct DRep {
    pub graph: Graph,
    pub field: RepField,
    pub d: usize,
    pub matrix: RepMatrix,
}

impl DRep {
    pub fn new(graph: Graph, field: RepField, d: usize, matrix: RepMatrix) -> Result<Self, HaemersError> {
        if d == 0 {
            return Err(HaemersError::ZeroBlockSize);
        }
        let expected = graph.n() * d;
        let (rows, cols) = match &matrix {
            RepMatrix::Exact(m) => (m.rows(), m.cols()),
            RepMatrix::Numeric(m) => (m.rows(), m.cols()),
        };
        if (rows, cols) != (expected, expected) {
            return Err(HaemersError::Shape { rows, cols, expected });
        }
        match (&field, &matrix) {
            (RepField::Exact(f), RepMatrix::Exact(m)) if *f == m.field() => {}
            (RepField::Complex | RepField::Real, RepMatrix::Numeric(_)) => {}
            _ => return Err(HaemersError::FieldMismatch),
        }
        Ok(Self { graph, field, d, matrix })
    }

    /// M = I_{nd}, valid for every graph.
    pub fn identity(graph: Graph, field: RepField, d: usize) -> Result<Self, HaemersError> {
        let nd = graph.n() * d;
        let matrix = match field {
            RepField::Exact(f) => RepMatrix::Exact(ExactMatrix::identity(f, nd)),
            _ => RepMatrix::Numeric(CMatrix::identity(nd)),
        };
        Self::new(graph, field, d, matrix)
    }

    pub fn rank(&self) -> usize {
        match &self.matrix {
            RepMatrix::Exact(m) => m.rank(),
            RepMatrix::Numeric(m) => m.rank_numeric(),
        }
    }

    pub fn to_json(&self) -> Value {
        let blocks = match &self.matrix {
            RepMatrix::Exact(m) => Value::Array(
                (0..m.rows())
                    .map(|i| {
                        Value::Array(
                            (0..m.cols())
                                .map(|j| match m.get(i, j) {
                                    Scalar::Rational(q) => json!(format_rational(&q)),
                                    Scalar::Mod(x) => json!(x),
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
            RepMatrix::Numeric(m) => wire::matrix_json(m),
        };
        json!({
            "graph": self.graph,
            "field": self.field.label(),
            "d": self.d,
            "blocks": blocks,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, HaemersError> {
        let graph: Graph = serde_json::from_value(v["graph"].clone()).map_err(|e| WireError::Json(e.to_string()))?;
        let d = v["d"].as_u64().ok_or_else(|| WireError::Field("d".into()))? as usize;
        let label = v["field"].as_str().ok_or_else(|| WireError::Field("field".into()))?;
        let blocks = &v["blocks"];
        let (field, matrix) = match label {
            "C" | "R" => {
                let field = if label == "C" { RepField::Complex } else { RepField::Real };
                (field, RepMatrix::Numeric(wire::parse_matrix(blocks, "blocks")?))
            }
            _ => {
                let tag = FieldTag::parse_label(label)?;
                let rows = blocks.as_array().ok_or_else(|| WireError::Field("blocks".into()))?;
                let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
                let mut m = ExactMatrix::zeros(tag, rows.len(), ncols);
                for (i, row) in rows.iter().enumerate() {
                    let row = row.as_array().filter(|r| r.len() == ncols).ok_or_else(|| WireError::Field("blocks".into()))?;
                    for (j, x) in row.iter().enumerate() {
                        let q = match x {
                            Value::String(s) => parse_rational(s)?,
                            Value::Number(n) => {
                                BigRational::from_integer(n.as_i64().ok_or_else(|| WireError::Field("blocks".into()))?.into())
                            }
                            _ => return Err(WireError::Field("blocks".into()).into()),
                        };
                        match tag {
                            FieldTag::Rationals => m.set(i, j, Scalar::Rational(q))?,
                            FieldTag::PrimeField(p) => {
                                if !q.is_integer() {
                                    return Err(WireError::Field("blocks".into()).into());
                                }
                                let r = q.to_integer() % num_bigint::BigInt::from(p);
                                let r: i64 = r.try_into().map_err(|_| WireError::Field("blocks".into()))?;
                                m.set_int(i, j, r);
                            }
                        }
                    }
                }
                (RepField::Exact(tag), RepMatrix::Exact(m))
            }
        };
        Self::new(graph, field, d, matrix)
    }
}

/// Checks M_{g,g} = I_d and M_{g,g'} = 0 for distinct non-adjacent g, g',
/// exactly over exact fields and within `tol` otherwise. Real-field reps must
/// also have real entries.
pub fn verify_drep(rep: &DRep, tol: f64) -> bool {
    let (n, d) = (rep.graph.n(), rep.d);
    let expect = |g: usize, gp: usize, a: usize, b: usize| -> Option<bool> {
        if g == gp {
            Some(a == b)
        } else if rep.graph.has_edge(g, gp) {
            None
        } else {
            Some(false)
        }
    };
    for g in 0..n {
        for gp in 0..n {
            for a in 0..d {
                for b in 0..d {
                    let Some(is_one) = expect(g, gp, a, b) else { continue };
                    let (i, j) = (g * d + a, gp * d + b);
                    let ok = match &rep.matrix {
                        RepMatrix::Exact(m) => match m.get(i, j) {
                            Scalar::Rational(q) => q == if is_one { BigRational::one() } else { BigRational::zero() },
                            Scalar::Mod(x) => x == u64::from(is_one),
                        },
                        RepMatrix::Numeric(m) => (m[(i, j)] - if is_one { 1.0 } else { 0.0 }).norm() <= tol,
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    match (&rep.field, &rep.matrix) {
        (RepField::Real, RepMatrix::Numeric(m)) => m.is_real_within(tol),
        _ => true,
    }
}

/// rk(M)/d for a verified representation.
pub fn haemers_upper_from_rep(rep: &DRep, tol: f64) -> Result<BigRational, HaemersError> {
    if !verify_drep(rep, tol) {
        return Err(HaemersError::InvalidRep);
    }
    Ok(BigRational::new(rep.rank().into(), rep.d.into()))
}

/// The d = 1 rational representation M = I − A/t.
pub fn eigen_shift_rep(g: &Graph, t: i64) -> Result<DRep, HaemersError> {
    if t == 0 {
        return Err(HaemersError::ZeroShift);
    }
    let n = g.n();
    let mut m = ExactMatrix::identity(FieldTag::Rationals, n);
    let entry = Scalar::Rational(BigRational::new((-1).into(), t.into()));
    for (u, v) in g.edges() {
        m.set(u, v, entry.clone())?;
        m.set(v, u, entry.clone())?;
    }
    DRep::new(g.clone(), RepField::Exact(FieldTag::Rationals), 1, RepMatrix::Exact(m))
}

/// Best eigen-shift bound over integer shifts t ∈ [−n, n] \ {0}, capped at n
/// (the identity representation). Returns the bound and the shift used.
pub fn best_eigen_shift_bound(g: &Graph) -> (usize, Option<i64>) {
    let n = g.n();
    let mut best = (n, None);
    for t in -(n as i64)..=(n as i64) {
        if t == 0 {
            continue;
        }
        let r = eigen_shift_rep(g, t).expect("t != 0").rank();
        if r < best.0 {
            best = (r, Some(t));
        }
    }
    best
}

/// Replaces every d×d complex block by its 2d×2d realification.
pub fn realify_drep(rep: &DRep, tol: f64) -> Result<DRep, HaemersError> {
    let (RepField::Complex | RepField::Real, RepMatrix::Numeric(m)) = (&rep.field, &rep.matrix) else {
        return Err(HaemersError::NotComplex);
    };
    if !verify_drep(rep, tol) {
        return Err(HaemersError::InvalidRep);
    }
    let (n, d) = (rep.graph.n(), rep.d);
    let mut out = CMatrix::zeros(2 * n * d, 2 * n * d);
    for g in 0..n {
        for gp in 0..n {
            out.place(2 * d * g, 2 * d * gp, &m.block(g * d, gp * d, d, d).realify());
        }
    }
    DRep::new(rep.graph.clone(), RepField::Real, 2 * d, RepMatrix::Numeric(out))
}

/// Representation of G⊠H whose ((g,h),(g',h')) block is M_{g,g'} ⊗ N_{h,h'}.
pub fn tensor_drep(r1: &DRep, r2: &DRep) -> Result<DRep, HaemersError> {
    let graph = r1.graph.strong_product(&r2.graph);
    let (n1, d1, n2, d2) = (r1.graph.n(), r1.d, r2.graph.n(), r2.d);
    let d = d1 * d2;
    let index = |g: usize, h: usize, a: usize, b: usize| (g * n2 + h) * d + a * d2 + b;
    match (&r1.matrix, &r2.matrix) {
        (RepMatrix::Exact(m1), RepMatrix::Exact(m2)) => {
            if m1.field() != m2.field() {
                return Err(HaemersError::FieldMismatch);
            }
            let field = m1.field();
            let k = m1.kron(m2)?;
            // kron index is (g d1 + a)(n2 d2) + h d2 + b
            let perm = |r: usize| {
                let (ga, hb) = (r / (n2 * d2), r % (n2 * d2));
                index(ga / d1, hb / d2, ga % d1, hb % d2)
            };
            let p: Vec<usize> = (0..n1 * d1 * n2 * d2).map(perm).collect();
            let m = k.permuted(&p, &p);
            DRep::new(graph, RepField::Exact(field), d, RepMatrix::Exact(m))
        }
        (RepMatrix::Numeric(m1), RepMatrix::Numeric(m2)) => {
            let field = if r1.field == RepField::Real && r2.field == RepField::Real {
                RepField::Real
            } else {
                RepField::Complex
            };
            let mut m = CMatrix::zeros(n1 * n2 * d, n1 * n2 * d);
            for g in 0..n1 {
                for gp in 0..n1 {
                    let b1 = m1.block(g * d1, gp * d1, d1, d1);
                    for h in 0..n2 {
                        for hp in 0..n2 {
                            let b = b1.kron(&m2.block(h * d2, hp * d2, d2, d2));
                            m.place(index(g, h, 0, 0), index(gp, hp, 0, 0), &b);
                        }
                    }
                }
            }
            DRep::new(graph, field, d, RepMatrix::Numeric(m))
        }
        _ => Err(HaemersError::FieldMismatch),
    }
}

/// Random valid d-representation: identity diagonal blocks, random blocks on
/// edges. `field` picks the entry distribution.
pub fn random_drep<R: Rng + ?Sized>(g: &Graph, field: RepField, d: usize, rng: &mut R) -> Result<DRep, HaemersError> {
    let mut rep = DRep::identity(g.clone(), field, d)?;
    for (u, v) in g.edges() {
        for (a, b) in [(u, v), (v, u)] {
            for i in 0..d {
                for j in 0..d {
                    let (r, c) = (a * d + i, b * d + j);
                    match &mut rep.matrix {
                        RepMatrix::Exact(m) => m.set_int(r, c, rng.random_range(-2..=2)),
                        RepMatrix::Numeric(m) => {
                            let im = if field == RepField::Real { 0.0 } else { rng.random_range(-1.0..1.0) };
                            m[(r, c)] = C64::new(rng.random_range(-1.0..1.0), im);
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Exact min-rank over GF(2) for d = 1 by trying every 0/1 assignment on the
/// ordered edge pairs. Limited to 5 vertices.
pub fn min_rank_gf2_bruteforce(g: &Graph) -> Result<usize, HaemersError> {
    let n = g.n();
    if n > 5 {
        return Err(HaemersError::TooLarge(5));
    }
    let slots: Vec<(usize, usize)> = g.edges().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    let mut best = n;
    for mask in 0u64..(1u64 << slots.len()) {
        let mut rows: Vec<u8> = (0..n).map(|i| 1u8 << i).collect();
        for (k, &(u, v)) in slots.iter().enumerate() {
            if mask >> k & 1 == 1 {
                rows[u] |= 1 << v;
            }
        }
        best = best.min(gf2_rank(rows));
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

fn gf2_rank(mut rows: Vec<u8>) -> usize {
    let mut rank = 0;
    for bit in 0..8 {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}
