use thiserror::Error;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("scan did not stabilize: {0}")]
    ScanResolution(String),
    #[error("sequence diverged: {0}")]
    Divergence(String),
    #[error("kernel solve unstable: {0}")]
    Instability(String),
    #[error("cholesky factorization failed: {0}")]
    Cholesky(String),
    #[error("condition violated: {0}")]
    Condition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("increment window too small: {0}")]
    Window(String),
    #[error("invalid initial value: {0}")]
    Xi(String),
    #[error("lag cap too small: {0}")]
    Lag(String),
    #[error("characteristic root inside the unit disk: {0}")]
    Root(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
