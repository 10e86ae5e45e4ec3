//! Dense matrices over ℚ (arbitrary precision) and GF(p).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("cannot parse field element `{0}`")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch")]
    FieldMismatch,
}

/// The scalar field of an [`ExactMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Rationals,
    PrimeField(u64),
}

impl FieldTag {
    pub fn prime(p: u64) -> Result<Self, ExactError> {
        if p < (1 << 31) && is_prime(p) {
            Ok(FieldTag::PrimeField(p))
        } else {
            Err(ExactError::NotPrime(p))
        }
    }

    /// `"Q"` or `"F_p"`.
    pub fn label(&self) -> String {
        match self {
            FieldTag::Rationals => "Q".into(),
            FieldTag::PrimeField(p) => format!("F_{p}"),
        }
    }

    pub fn parse_label(s: &str) -> Result<Self, ExactError> {
        match s {
            "Q" => Ok(FieldTag::Rationals),
            _ => {
                let p = s
                    .strip_prefix("F_")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| ExactError::Parse(s.into()))?;
                FieldTag::prime(p)
            }
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. GF(p) residues are kept in `0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Mod(u64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Mod(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Entries {
    Rational(Vec<BigRational>),
    Mod { p: u64, data: Vec<u64> },
}

/// Dense row-major matrix over [`FieldTag`]. Rational entries stay reduced
/// (`BigRational` normalises on every operation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl ExactMatrix {
    pub fn zeros(field: FieldTag, rows: usize, cols: usize) -> Self {
        let entries = match field {
            FieldTag::Rationals => Entries::Rational(vec![BigRational::zero(); rows * cols]),
            FieldTag::PrimeField(p) => Entries::Mod {
                p,
                data: vec![0; rows * cols],
            },
        };
        Self { rows, cols, entries }
    }

    pub fn identity(field: FieldTag, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set_int(i, i, 1);
        }
        m
    }

    /// Integer entries, reduced into the field.
    pub fn from_integers(field: FieldTag, rows: usize, cols: usize, values: &[i64]) -> Result<Self, ExactError> {
        if values.len() != rows * cols {
            return Err(ExactError::Shape(format!("{} values for {rows}x{cols}", values.len())));
        }
        let mut m = Self::zeros(field, rows, cols);
        for (k, &v) in values.iter().enumerate() {
            m.set_int(k / cols, k % cols, v);
        }
        Ok(m)
    }

    pub fn from_rationals(rows: usize, cols: usize, values: Vec<BigRational>) -> Result<Self, ExactError> {
        if values.len() != rows * cols {
            return Err(ExactError::Shape(format!("{} values for {rows}x{cols}", values.len())));
        }
        Ok(Self {
            rows,
            cols,
            entries: Entries::Rational(values),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldTag {
        match &self.entries {
            Entries::Rational(_) => FieldTag::Rationals,
            Entries::Mod { p, .. } => FieldTag::PrimeField(*p),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        let k = i * self.cols + j;
        match &self.entries {
            Entries::Rational(d) => Scalar::Rational(d[k].clone()),
            Entries::Mod { data, .. } => Scalar::Mod(data[k]),
        }
    }

    pub fn is_zero_at(&self, i: usize, j: usize) -> bool {
        let k = i * self.cols + j;
        match &self.entries {
            Entries::Rational(d) => d[k].is_zero(),
            Entries::Mod { data, .. } => data[k] == 0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) -> Result<(), ExactError> {
        let k = i * self.cols + j;
        match (&mut self.entries, value) {
            (Entries::Rational(d), Scalar::Rational(q)) => d[k] = q,
            (Entries::Mod { p, data }, Scalar::Mod(x)) => data[k] = x % *p,
            _ => return Err(ExactError::FieldMismatch),
        }
        Ok(())
    }

    pub fn set_int(&mut self, i: usize, j: usize, value: i64) {
        let k = i * self.cols + j;
        match &mut self.entries {
            Entries::Rational(d) => d[k] = BigRational::from_integer(value.into()),
            Entries::Mod { p, data } => data[k] = value.rem_euclid(*p as i64) as u64,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            Entries::Rational(d) => d.iter().all(Zero::is_zero),
            Entries::Mod { data, .. } => data.iter().all(|&x| x == 0),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| match self.get(i, j) {
                    Scalar::Rational(q) => q == if i == j { BigRational::one() } else { BigRational::zero() },
                    Scalar::Mod(x) => x == u64::from(i == j),
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j)).expect("same field");
            }
        }
        t
    }

    pub fn kron(&self, other: &ExactMatrix) -> Result<Self, ExactError> {
        if self.field() != other.field() {
            return Err(ExactError::FieldMismatch);
        }
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(self.field(), r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = mul_scalar(&self.get(i, j), &other.get(k, l), self.field());
                        out.set(i * other.rows + k, j * other.cols + l, v)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copies `block` into the sub-matrix starting at `(row, col)`.
    pub fn place(&mut self, row: usize, col: usize, block: &ExactMatrix) -> Result<(), ExactError> {
        if row + block.rows > self.rows || col + block.cols > self.cols {
            return Err(ExactError::Shape("block does not fit".into()));
        }
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j))?;
            }
        }
        Ok(())
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(self.field(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(row + i, col + j)).expect("same field");
            }
        }
        out
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.field(), self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(row_perm[i], col_perm[j], self.get(i, j)).expect("same field");
            }
        }
        out
    }

    /// Rank by Gaussian elimination: fraction-free (Bareiss) over ℚ after
    /// clearing denominators row by row, plain elimination over GF(p).
    pub fn rank(&self) -> usize {
        match &self.entries {
            Entries::Rational(d) => bareiss_rank(self.rows, self.cols, integer_rows(self.rows, self.cols, d)),
            Entries::Mod { p, data } => mod_p_rank(self.rows, self.cols, *p, data.clone()),
        }
    }
}

/// Free-function form of [`ExactMatrix::rank`].
pub fn rank_exact(m: &ExactMatrix) -> usize {
    m.rank()
}

fn mul_scalar(a: &Scalar, b: &Scalar, field: FieldTag) -> Scalar {
    match (a, b, field) {
        (Scalar::Rational(x), Scalar::Rational(y), _) => Scalar::Rational(x * y),
        (Scalar::Mod(x), Scalar::Mod(y), FieldTag::PrimeField(p)) => Scalar::Mod(x * y % p),
        _ => unreachable!("field checked by caller"),
    }
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(rows: usize, cols: usize, d: &[BigRational]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let row = &d[i * cols..(i + 1) * cols];
        let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        out.extend(row.iter().map(|q| q.numer() * (&lcm / q.denom())));
    }
    out
}

fn bareiss_rank(rows: usize, cols: usize, mut a: Vec<BigInt>) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let p = a[rank * cols + col].clone();
        for r in (rank + 1)..rows {
            let f = a[r * cols + col].clone();
            for j in (col + 1)..cols {
                let v = &p * &a[r * cols + j] - &f * &a[rank * cols + j];
                debug_assert!((&v % &prev).is_zero());
                a[r * cols + j] = v / &prev;
            }
            a[r * cols + col] = BigInt::zero();
        }
        prev = p;
        rank += 1;
    }
    rank
}

fn mod_p_rank(rows: usize, cols: usize, p: u64, mut a: Vec<u64>) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = pow_mod(a[rank * cols + col], p - 2, p);
        for r in (rank + 1)..rows {
            let f = a[r * cols + col] * inv % p;
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let sub = f * a[rank * cols + j] % p;
                a[r * cols + j] = (a[r * cols + j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// `"p/q"` (or `"p"`) to a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| ExactError::Parse(s.into()));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
