//! Exact field arithmetic, polynomials and dense linear algebra kernels.

pub mod matrix;
pub mod poly;
pub mod scalar;

pub use matrix::{Matrix, Vector};
pub use poly::{partial_fractions, spectrum_extract, Poly};
pub use scalar::Scalar;
