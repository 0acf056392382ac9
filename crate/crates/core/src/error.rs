use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the laboratory. Every variant maps onto a stable
/// machine-readable kind (see [`Error::kind`]) that the experiment runner
/// writes into its error JSON.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("invalid holes: {0}")]
    InvalidHoles(String),
    #[error("invalid mass: {0}")]
    InvalidMass(String),
    #[error("unbalanced jumps: sum of jumps is {sum:e} (tolerance {tolerance:e})")]
    UnbalancedJumps { sum: f64, tolerance: f64 },
    #[error("model has {0} holes, exactly one is required")]
    NotOneHole(usize),
    #[error("cantor mass {0} is positive, gaps do not have full measure")]
    NotFullGapMeasure(f64),
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("minimization failed: {0}")]
    MinimizationFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InsufficientDepth(_) => "insufficient-depth",
            Error::InvalidHoles(_) => "invalid-holes",
            Error::InvalidMass(_) => "invalid-mass",
            Error::UnbalancedJumps { .. } => "unbalanced-jumps",
            Error::NotOneHole(_) => "not-one-hole",
            Error::NotFullGapMeasure(_) => "not-full-gap-measure",
            Error::IntegrationFailure(_) => "integration-failure",
            Error::MinimizationFailed(_) => "minimization-failed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
