use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("no points")]
    NoPoints,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel must be bounded")]
    UnboundedKernel,
    #[error("Palm sampling only for PPP")]
    PalmOnlyPoisson,
    #[error("uncovered target: {0}")]
    UncoveredTarget(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("certification failed: {0}")]
    Uncertified(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
