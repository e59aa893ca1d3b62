use thiserror::Error;

/// Errors raised by the geometric evaluators and the report pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested point lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A finite-difference stencil left the domain.
    #[error("finite-difference stencil leaves the domain (step {step})")]
    StepTooLarge { step: f64 },

    /// A closed-form coefficient has a vanishing denominator.
    #[error("singular coefficient: {0}")]
    SingularCoefficient(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
