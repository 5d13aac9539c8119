use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Degradation(#[from] schn_degradation::DegradationError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("upscaler error: {0}")]
    Upscaler(String),
}

pub type Result<T> = std::result::Result<T, MetricsError>;
