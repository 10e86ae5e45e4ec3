//! Bounds and certificates for zero-error capacities of graphs and
//! non-commutative graphs.

pub mod combinatorics;
pub mod graph;
pub mod haemers;
pub mod harness;
pub mod linalg;
pub mod lp;
pub mod nc;
pub mod quantum;
pub mod sdp;
pub mod wire;
