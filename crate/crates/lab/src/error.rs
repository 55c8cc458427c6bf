use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{what} is {value}, above the limit {limit}")]
    Guard { what: &'static str, value: usize, limit: usize },
    #[error(transparent)]
    Core(#[from] vrjp_core::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    /// Errors the user can fix by editing the config.
    pub fn is_config(&self) -> bool {
        matches!(self, LabError::Config(_) | LabError::Syntax(_) | LabError::Guard { .. })
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
