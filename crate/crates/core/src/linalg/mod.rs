//! Exact linear algebra over F2.

mod matrix;
mod poly;
mod subspace;

pub use matrix::{invariant_factors_from_elementary, rcf_from_factors, BitMatrix, MAX_DIM};
pub use poly::GF2Poly;
pub(crate) use poly::prime_factors;
pub use subspace::{dot, rank, rref, Subspace};
