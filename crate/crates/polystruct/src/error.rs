use thiserror::Error;

/// Errors surfaced by the analysis pipeline.
///
/// `UnsupportedSpectrum` is kept separate from the validation errors because
/// the command line maps it to its own exit code: it marks structurally valid
/// input whose eigenvalues merely leave the coefficient field.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by zero polynomial")]
    ZeroPolyDivision,

    #[error("Jacobi identity fails on basis triple (v{0}, v{1}, v{2})")]
    Jacobi(usize, usize, usize),

    #[error("endomorphism is not skew-symmetric for the tautological pairing (frame pair {0}, {1})")]
    NotSkew(usize, usize),

    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),

    #[error("root multiset inconsistent with polynomial: {0}")]
    RootsMismatch(String),

    #[error("operator is not the Clifford action of a generalized vector")]
    NotAVector,

    #[error("subspace is not isotropic")]
    NotIsotropic,

    #[error("pairing is degenerate on the given subspace")]
    Degenerate,

    #[error("endomorphisms do not commute")]
    NonCommuting,

    #[error("frame change block is not invertible")]
    NonInvertibleFrameChange,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
