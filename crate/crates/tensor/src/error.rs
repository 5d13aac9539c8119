use thiserror::Error;

#[derive(Debug, Error)]
pub enum TensorError {
    /// Incompatible operand shapes or an invalid operator parameter.
    #[error("{op}: {details}")]
    ShapeMismatch { op: &'static str, details: String },

    /// An operator produced NaN or Inf. Finite values after every forward
    /// operation are an invariant of the core.
    #[error("{op} produced non-finite values")]
    NonFinite { op: &'static str },

    /// `backward` was called on a non-scalar tensor.
    #[error("backward requires a scalar loss, got {numel} elements")]
    NotScalar { numel: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, TensorError>;
