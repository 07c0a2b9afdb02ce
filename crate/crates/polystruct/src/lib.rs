//! Exact analysis of invariant generalized polynomial structures on Lie
//! algebras: pairing-skew endomorphisms of the double `g + g*` satisfying a
//! polynomial identity, their spectra and block decompositions, the full
//! family of Courant-Nijenhuis-type torsions, and the minimality /
//! non-resonance / integrability verdicts. All arithmetic is exact over the
//! Gaussian rationals.
//!
//! Every value is immutable after construction and every operation is a pure
//! function; nothing here holds global state, so all of it can be used from
//! multiple threads without synchronization.

pub mod checks;
pub mod double;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod report;
pub mod scalars;
pub mod spectral;
pub mod torsion;

pub use error::{Error, Result};
