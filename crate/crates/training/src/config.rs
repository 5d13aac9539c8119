use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use schn_degradation::DegradationSpec;
use schn_network::SchConfig;

use crate::error::{Result, TrainError};

/// Which LR image feeds the network: the noise-free one (NF) or the noisy
/// one (AN). Targets are always the HR patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    NF,
    AN,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub variant: Variant,
    /// Balancing coefficient for the intermediate heads.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_lr_initial")]
    pub lr_initial: f64,
    /// Epochs between learning-rate halvings.
    #[serde(default = "default_halving")]
    pub lr_halving_period: u32,
    #[serde(default = "default_epochs")]
    pub max_epochs: u32,
    /// Optional hard cap on optimizer steps (desk-scale budgets).
    #[serde(default)]
    pub max_steps: Option<u64>,
    pub seed: u64,
    /// Directory of HR PNG images the patch manifest is built from.
    pub hr_dir: PathBuf,
    #[serde(default = "default_patch_size")]
    pub patch_size: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub model: SchConfig,
    pub degradation: DegradationSpec,
}

fn default_lambda() -> f64 {
    0.05
}
fn default_batch_size() -> usize {
    4
}
fn default_lr_initial() -> f64 {
    5e-5
}
fn default_halving() -> u32 {
    10
}
fn default_epochs() -> u32 {
    60
}
fn default_patch_size() -> usize {
    256
}
fn default_stride() -> usize {
    240
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 {
            return Err(TrainError::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.lr_initial <= 0.0 {
            return Err(TrainError::Config(format!(
                "initial learning rate must be positive, got {}",
                self.lr_initial
            )));
        }
        if self.batch_size == 0 || self.lr_halving_period == 0 {
            return Err(TrainError::Config(
                "batch size and halving period must be positive".into(),
            ));
        }
        self.model.validate()?;
        self.degradation
            .validate()
            .map_err(TrainError::Degradation)?;
        if self.model.scale_factor as u32 != self.degradation.scale_factor {
            return Err(TrainError::Config(format!(
                "model scale x{} != degradation scale x{}",
                self.model.scale_factor, self.degradation.scale_factor
            )));
        }
        if self.patch_size % self.model.scale_factor != 0 {
            return Err(TrainError::Config(format!(
                "patch size {} not divisible by scale {}",
                self.patch_size, self.model.scale_factor
            )));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let config: TrainConfig = serde_json::from_str(&raw)?;
        config.validate()?;
        Ok(config)
    }
}
