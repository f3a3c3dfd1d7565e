use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation of U†U from identity {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EigenNotConverged { sweeps: usize, off_norm: f64 },

    #[error("invalid encoding spec: {0}")]
    InvalidSpec(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error(
        "coherent-state truncation at cutoff {cutoff} loses {deficit:.3e} of the norm for feature {value} (tolerance {tolerance:.0e})"
    )]
    TruncationError {
        cutoff: usize,
        value: f64,
        deficit: f64,
        tolerance: f64,
    },

    #[error("{strategy} encoding has no closed-form kernel")]
    UnsupportedStrategy { strategy: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency enumeration needs {required} multi-index pairs, cap is {cap}")]
    EnumerationTooLarge { required: f64, cap: usize },

    #[error("Fourier series has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("SVM dual did not converge within {passes} passes (duality gap {gap:.3e})")]
    NotConverged { passes: usize, gap: f64 },

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Dataset { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidState(_) => "invalid_state",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::InvalidDensityMatrix(_) => "invalid_density_matrix",
            Error::EigenNotConverged { .. } => "eigen_not_converged",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::MalformedInput(_) => "malformed_input",
            Error::TruncationError { .. } => "truncation_error",
            Error::UnsupportedStrategy { .. } => "unsupported_strategy",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EnumerationTooLarge { .. } => "enumeration_too_large",
            Error::ImaginaryResidue { .. } => "imaginary_residue",
            Error::NotConverged { .. } => "not_converged",
            Error::UnsupportedGate(_) => "unsupported_gate",
            Error::Diverged { .. } => "diverged",
            Error::Io { .. } => "io",
            Error::Dataset { .. } => "dataset",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
