use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate correlation |rho| = 1 has no bivariate density")]
    DegenerateCorrelation,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("signal vanished in layer {layer} (variance {variance:e})")]
    VanishedSignal { layer: usize, variance: f64 },

    #[error("non-finite kernel value in layer {layer}")]
    NonFinite { layer: usize },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyper(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not positive definite even with jitter {max_jitter:e}")]
    Factorisation { max_jitter: f64 },

    #[error("perturbation proviso violated: s^2/c^2 * ||K^-1|| = {0} >= 1")]
    ProvisoViolated(f64),

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
