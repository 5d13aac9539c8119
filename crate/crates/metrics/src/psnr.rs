use schn_degradation::ImageBuffer;

use crate::error::{MetricsError, Result};

/// Cap reported for a zero-MSE (identical) pair; keeps reports finite and
/// sortable.
pub const PSNR_CAP_DB: f64 = 100.0;

/// Peak signal-to-noise ratio in dB with MSE pooled over all three channels
/// jointly, peak value 1.0. Expects inputs already clamped to `[0,1]`.
pub fn psnr_rgb(pred: &ImageBuffer, reference: &ImageBuffer) -> Result<f64> {
    if pred.height() != reference.height() || pred.width() != reference.width() {
        return Err(MetricsError::Shape(format!(
            "{}x{} vs {}x{}",
            pred.height(),
            pred.width(),
            reference.height(),
            reference.width()
        )));
    }
    let mut acc = 0.0f64;
    for (&a, &b) in pred.data().iter().zip(reference.data()) {
        let d = a as f64 - b as f64;
        acc += d * d;
    }
    let mse = acc / pred.data().len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}
