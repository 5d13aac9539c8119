//! The benchmark-grid runner: degrade each dataset image under each
//! condition, run a super-resolution system, and score against the HR
//! original.

use std::path::Path;

use serde::{Deserialize, Serialize};

use schn_degradation::rng::derive_seed;
use schn_degradation::{
    bicubic_resize, degrade_with, BlurParams, DegradeProvenance, ImageBuffer, NoiseParams, Scale,
};

use crate::error::{MetricsError, Result};
use crate::psnr::psnr_rgb;
use crate::ssim::ssim_rgb;

/// Blur component of an evaluation condition. Benchmark kernels are always
/// axis-aligned (theta = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    None,
    Iso { sigma: f64 },
    Aniso { sigma_x: f64, sigma_y: f64 },
}

impl KernelSpec {
    fn to_blur_params(self) -> Option<BlurParams> {
        match self {
            KernelSpec::None => None,
            KernelSpec::Iso { sigma } => Some(BlurParams {
                sigma_x: sigma,
                sigma_y: sigma,
                theta: 0.0,
            }),
            KernelSpec::Aniso { sigma_x, sigma_y } => Some(BlurParams {
                sigma_x,
                sigma_y,
                theta: 0.0,
            }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KernelSpec::None => "none".to_string(),
            KernelSpec::Iso { sigma } => format!("iso{sigma}"),
            KernelSpec::Aniso { sigma_x, sigma_y } => format!("aniso{sigma_x}x{sigma_y}"),
        }
    }
}

/// One cell of an evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalCondition {
    pub scale: u32,
    pub kernel: KernelSpec,
    pub noise_level: f64,
}

impl EvalCondition {
    pub fn id(&self) -> String {
        format!("x{}_{}_n{}", self.scale, self.kernel.label(), self.noise_level)
    }
}

/// A super-resolution system under evaluation.
pub trait Upscaler {
    fn name(&self) -> String;
    fn upscale(&self, lr: &ImageBuffer, scale: u32) -> Result<ImageBuffer>;
}

/// The trained-model-free baseline: bicubic upscaling of the LR input.
pub struct BicubicBaseline;

impl Upscaler for BicubicBaseline {
    fn name(&self) -> String {
        "bicubic".to_string()
    }

    fn upscale(&self, lr: &ImageBuffer, scale: u32) -> Result<ImageBuffer> {
        Ok(bicubic_resize(lr, Scale::up(scale), false)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageScore {
    pub image: String,
    pub psnr_db: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: EvalCondition,
    pub scores: Vec<ImageScore>,
    /// Arithmetic means of the per-image values.
    pub mean_psnr_db: f64,
    pub mean_ssim: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub system: String,
    pub tool_version: String,
    pub seed: u64,
    pub skipped_images: usize,
    pub conditions: Vec<ConditionReport>,
}

/// Load every `.png` in a directory (sorted by file name), counting
/// unreadable files instead of failing.
pub fn load_dataset(dir: &Path) -> Result<(Vec<(String, ImageBuffer)>, usize)> {
    let mut names: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .collect();
    names.sort();
    let mut images = Vec::new();
    let mut skipped = 0;
    for path in names {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match ImageBuffer::load_png(&path) {
            Ok(img) => images.push((name, img)),
            Err(_) => skipped += 1,
        }
    }
    Ok((images, skipped))
}

/// Crop an image to dimensions divisible by `scale` (degradation requires
/// divisibility; benchmark sets are typically already aligned).
fn modcrop(img: &ImageBuffer, scale: u32) -> Result<ImageBuffer> {
    let s = scale as usize;
    let (h, w) = (img.height() / s * s, img.width() / s * s);
    if h == 0 || w == 0 {
        return Err(MetricsError::Config(format!(
            "image {}x{} smaller than scale {scale}",
            img.height(),
            img.width()
        )));
    }
    if (h, w) == (img.height(), img.width()) {
        Ok(img.clone())
    } else {
        Ok(img.crop(0, 0, h, w)?)
    }
}

/// Evaluate a system over every (condition, image) pair: degrade with the
/// condition's exact parameters (theta = 0, fixed seed), upscale, clamp to
/// `[0,1]`, and score against the HR original. Scores are ordered by image
/// name so the report is independent of evaluation order.
pub fn eval_grid(
    system: &dyn Upscaler,
    images: &[(String, ImageBuffer)],
    conditions: &[EvalCondition],
    seed: u64,
) -> Result<EvalReport> {
    let mut sorted: Vec<&(String, ImageBuffer)> = images.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let mut reports = Vec::with_capacity(conditions.len());
    for (ci, condition) in conditions.iter().enumerate() {
        let mut scores = Vec::with_capacity(sorted.len());
        for (ii, (name, hr)) in sorted.iter().enumerate() {
            let hr = modcrop(hr, condition.scale)?;
            let noise = if condition.noise_level > 0.0 {
                Some(NoiseParams {
                    level: condition.noise_level,
                    field_seed: derive_seed(seed, "eval-noise", (ci * 100_000 + ii) as u64),
                })
            } else {
                None
            };
            let provenance = DegradeProvenance {
                blur: condition.kernel.to_blur_params(),
                noise,
            };
            let degraded = degrade_with(&hr, condition.scale, &provenance)?;
            let sr = system.upscale(&degraded.lr_noisy, condition.scale)?;
            let sr = sr.clamped();
            scores.push(ImageScore {
                image: name.clone(),
                psnr_db: psnr_rgb(&sr, &hr)?,
                ssim: ssim_rgb(&sr, &hr)?,
            });
        }
        let n = scores.len().max(1) as f64;
        let mean_psnr_db = scores.iter().map(|s| s.psnr_db).sum::<f64>() / n;
        let mean_ssim = scores.iter().map(|s| s.ssim).sum::<f64>() / n;
        reports.push(ConditionReport {
            condition: *condition,
            scores,
            mean_psnr_db,
            mean_ssim,
        });
    }
    Ok(EvalReport {
        system: system.name(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        skipped_images: 0,
        conditions: reports,
    })
}
