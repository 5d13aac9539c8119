use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, Result};

/// Architecture configuration. The reference configuration is 64 channels,
/// 8 modules, 2 hallucination maps per module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchConfig {
    /// Feature channels throughout the LR-resolution trunk.
    #[serde(default = "default_channels")]
    pub channels: usize,
    /// Number of stacked SCH modules. 0 degenerates to the entry stage plus
    /// a single sub-pixel head.
    pub n_modules: usize,
    /// Hallucination maps (offset branches) per module.
    pub n_maps: usize,
    /// Upscaling factor, 2 or 4.
    pub scale_factor: usize,
    #[serde(default = "default_slope")]
    pub leaky_slope: f64,
}

fn default_channels() -> usize {
    64
}

fn default_slope() -> f64 {
    0.2
}

impl SchConfig {
    /// The paper-reference configuration for one scale factor.
    pub fn reference(scale_factor: usize) -> Self {
        SchConfig {
            channels: 64,
            n_modules: 8,
            n_maps: 2,
            scale_factor,
            leaky_slope: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.scale_factor, 2 | 4) {
            return Err(NetworkError::Config(format!(
                "scale factor must be 2 or 4, got {}",
                self.scale_factor
            )));
        }
        if self.channels == 0 {
            return Err(NetworkError::Config("channels must be positive".into()));
        }
        if self.n_modules == 0 && self.n_maps > 0 {
            return Err(NetworkError::Config(
                "hallucination maps require at least one module".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.leaky_slope) || self.leaky_slope == 0.0 {
            return Err(NetworkError::Config(format!(
                "leaky slope must be in (0,1), got {}",
                self.leaky_slope
            )));
        }
        Ok(())
    }
}
