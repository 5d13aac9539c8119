use thiserror::Error;

use crate::trainer::BatchProvenance;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The forward pass produced NaN/Inf. Carries the manifest of the batch
    /// that triggered it so the run can be diagnosed and replayed.
    #[error("non-finite values in training step {step}")]
    NonFinite {
        step: u64,
        batch: Vec<BatchProvenance>,
    },

    #[error(transparent)]
    Tensor(schn_tensor::TensorError),

    #[error(transparent)]
    Network(#[from] schn_network::NetworkError),

    #[error(transparent)]
    Degradation(#[from] schn_degradation::DegradationError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TrainError>;
