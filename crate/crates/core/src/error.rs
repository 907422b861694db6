use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),

    #[error("k = {k} exceeds the supported maximum of {max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("deformed number [x]_Q is undefined at Q = 1")]
    DeformationAtOne,

    #[error("operands carry different deformation parameters (k = {left} vs k = {right})")]
    ParamsMismatch { left: usize, right: usize },

    #[error("coherence factor order must be at least 1, got {0}")]
    InvalidOrder(i64),

    #[error("the quantum-group construction divides by q - 1/q, which vanishes for k = 2")]
    QuantumGroupDegenerate,

    #[error("operator {name} is numerically singular (inverse residual {residual:.3e})")]
    Singular { name: &'static str, residual: f64 },

    #[error("operator {0} is not part of the Grassmannian realization")]
    NotAGenerator(String),

    #[error("{name}: constructions disagree (residual {residual:.3e}); {detail}")]
    Mismatch { name: &'static str, residual: f64, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
