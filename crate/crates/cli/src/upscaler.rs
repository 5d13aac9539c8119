use schn_degradation::ImageBuffer;
use schn_metrics::{MetricsError, Upscaler};
use schn_network::convert::{images_to_tensor, tensor_to_image};
use schn_network::{ForwardMode, SchnModel};

/// A trained model served through the evaluation-grid interface. Inference
/// uses the final head only (bypassed intermediate heads).
pub struct ModelUpscaler {
    pub model: SchnModel<f32>,
    pub label: String,
}

impl Upscaler for ModelUpscaler {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn upscale(&self, lr: &ImageBuffer, scale: u32) -> Result<ImageBuffer, MetricsError> {
        if self.model.config.scale_factor as u32 != scale {
            return Err(MetricsError::Config(format!(
                "checkpoint is x{} but the condition needs x{scale}",
                self.model.config.scale_factor
            )));
        }
        let input = images_to_tensor(&[lr]).map_err(|e| MetricsError::Upscaler(e.to_string()))?;
        let out = self
            .model
            .forward(&input, ForwardMode::FinalOnly)
            .map_err(|e| MetricsError::Upscaler(e.to_string()))?;
        tensor_to_image(out.final_output(), 0).map_err(|e| MetricsError::Upscaler(e.to_string()))
    }
}
