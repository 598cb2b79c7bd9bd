//! Search and analysis toolkit for quadratic APN functions F2^n -> F2^n.
//!
//! Vectors of F2^n are `u32` words with coordinate 1 stored in the most
//! significant of the `n` low bits. Field elements of GF(2^n) use the
//! polynomial basis with the constant term in bit 0.

pub mod equiv;
pub mod error;
pub mod field;
pub mod known;
pub mod le;
pub mod boolfun;
pub mod classes;
pub mod linalg;
pub mod search;
pub mod switching;

pub use error::{Error, Result};
