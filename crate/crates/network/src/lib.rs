//! The SCHN super-resolution model: an entry stage (conv + resblock)
//! followed by stacked spatial-context hallucination modules.
//!
//! Each module learns per-pixel offset fields ("hallucination maps"), warps
//! its input features by them, fuses original and warped features with a
//! convolution, and produces one high-resolution output through a sub-pixel
//! head. Only the last module's output is the final prediction, so the
//! intermediate heads can be bypassed at inference.

mod checkpoint;
mod config;
pub mod convert;
mod error;
mod layers;
mod model;
mod params;
pub mod viz;

pub use checkpoint::{
    load_model, read_checkpoint, save_model, write_checkpoint, CheckpointHeader, TensorRecord,
    CHECKPOINT_VERSION,
};
pub use config::SchConfig;
pub use error::{NetworkError, Result};
pub use layers::Conv2dLayer;
pub use model::{ForwardMode, HrHead, SchModule, SchnModel, SchnOutput};
pub use params::{param_count, CountMode};
