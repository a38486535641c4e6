use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input data violates a precondition (wrong range, NaN, bad shape, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two grids that must share a shape do not.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// The residual spectrum carries no usable off-DC energy, so no stripe
    /// direction can be estimated.
    #[error("orientation undeterminable: residual spectrum has no dominant frequency")]
    OrientationUndeterminable,

    /// A solver iterate became non-finite; reports the sub-step that produced it.
    #[error("solver produced a non-finite value in {step} update at iteration {iteration}")]
    SolverDiverged {
        step: &'static str,
        iteration: usize,
    },

    /// Malformed text or binary content in one of the tool's file formats.
    #[error("bad format in {path}: {reason}")]
    BadFormat { path: PathBuf, reason: String },

    /// Configuration file problem (syntax, unknown key, bad value).
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Codec {
        path: PathBuf,
        source: ::image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
