use thiserror::Error;

pub type LabResult<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("invalid check spec for `{check_id}`: {reason}")]
    InvalidSpec { check_id: String, reason: String },
    #[error("parameter `{key}`: {reason}")]
    Parameter { key: String, reason: String },
    #[error(transparent)]
    Core(#[from] toa_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
