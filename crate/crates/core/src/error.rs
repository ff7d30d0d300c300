use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum DldlError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("degenerate hypergraph: {0}")]
    DegenerateHypergraph(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    /// The alternating solver observed an objective increase. This is a bug,
    /// never an input problem.
    #[error(
        "internal consistency error: objective rose from {previous} to {current} during {stage} (iteration {iteration})"
    )]
    ObjectiveIncrease {
        stage: &'static str,
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model format error in section `{section}`: {message}")]
    Format { section: String, message: String },

    #[error("unsupported model format version `{0}` (expected DLDL/1)")]
    UnsupportedVersion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = DldlError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> DldlError {
    DldlError::InvalidArgument(msg.into())
}
