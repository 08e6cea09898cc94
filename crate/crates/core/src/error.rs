use thiserror::Error;

#[derive(Debug, Error)]
pub enum MedError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("density evaluation failed at x = {point:?}: {reason}")]
    Evaluation { point: Vec<f64>, reason: String },

    #[error("protocol error at x = {point:?}: {reason}")]
    Protocol { point: Vec<f64>, reason: String },

    #[error("surrogate factorization failed after jitter escalation; near-duplicate training points {first} and {second}")]
    Factorization { first: usize, second: usize },

    #[error("no usable candidates around design point {index} at stage {stage}")]
    EmptyCandidatePool { stage: usize, index: usize },

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MedError>;

impl MedError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        MedError::InvalidArgument(msg.into())
    }
}
