use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwanError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("placement arity mismatch: layout has {expected} segments, placement has {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("segment index {index} out of range for a {segments}-segment layout")]
    SegmentOutOfRange { index: usize, segments: usize },

    #[error("user and antenna positions coincide; channel is undefined")]
    CoincidentPoints,

    #[error("rate computation needs at least one SNR value")]
    EmptyInput,

    #[error("objective returned NaN at {at}")]
    NanObjective { at: f64 },

    #[error("antenna position {position} lies outside the waveguide span [{start}, {end}]")]
    OutOfSpan { position: f64, start: f64, end: f64 },

    #[error("scheme {scheme} is not supported by {context}")]
    UnsupportedScheme {
        scheme: crate::model::Scheme,
        context: &'static str,
    },

    #[error("infeasible placement: {0}")]
    Infeasible(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, SwanError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SwanError {
    SwanError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
