//! Exact and floating-point dense linear algebra.

pub mod exact;

pub use exact::{rank_exact, ExactError, ExactMatrix, FieldTag, Scalar};
pub mod complex;

pub use complex::{CMatrix, MatrixError, C64, DEFAULT_TOL};
