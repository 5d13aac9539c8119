//! Training: the weighted multi-head L1 objective, the step-halving
//! learning-rate schedule, and a fully deterministic training loop over
//! dynamically degraded patches.

mod config;
mod error;
mod loss;
mod trainer;

pub use config::{TrainConfig, Variant};
pub use error::{Result, TrainError};
pub use loss::{lr_schedule, multi_head_loss};
pub use trainer::{
    load_patch_set, resume_trainer, save_train_checkpoint, BatchProvenance, PatchRef, PatchSet,
    StepRecord, Trainer,
};
