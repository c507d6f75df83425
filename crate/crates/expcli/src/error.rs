use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExpError>;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error(transparent)]
    Core(#[from] stoq_core::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("config file: {0}")]
    TomlRead(#[from] toml::de::Error),
    #[error("config serialization: {0}")]
    TomlWrite(#[from] toml::ser::Error),
    #[error("record encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error("summary table: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
