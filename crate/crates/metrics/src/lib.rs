//! Image-quality metrics (PSNR and SSIM on the RGB channels) and the
//! benchmark-grid evaluation runner.

mod error;
mod grid;
mod psnr;
mod report;
mod ssim;

pub use error::{MetricsError, Result};
pub use grid::{
    eval_grid, load_dataset, BicubicBaseline, ConditionReport, EvalCondition, EvalReport,
    ImageScore, KernelSpec, Upscaler,
};
pub use psnr::psnr_rgb;
pub use report::{report_to_csv, report_to_json};
pub use ssim::ssim_rgb;
