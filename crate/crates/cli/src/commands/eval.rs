use serde::Deserialize;

use schn_metrics::{
    eval_grid, load_dataset, report_to_csv, report_to_json, BicubicBaseline, EvalCondition,
    Upscaler,
};
use schn_network::load_model;

use crate::errors::CliError;
use crate::manifest::ManifestBuilder;
use crate::upscaler::ModelUpscaler;
use crate::EvalArgs;

#[derive(Deserialize)]
struct GridFile {
    conditions: Vec<EvalCondition>,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let builder = ManifestBuilder::new("eval");
    let raw = std::fs::read_to_string(&args.grid)
        .map_err(|e| CliError::Config(format!("cannot read grid: {e}")))?;
    let grid: GridFile = serde_json::from_str(&raw)?;

    let system: Box<dyn Upscaler> = match (&args.ckpt, args.baseline.as_deref()) {
        (Some(ckpt), None) => {
            let model = load_model(ckpt)?;
            Box::new(ModelUpscaler {
                label: format!("schn:{}", ckpt.display()),
                model,
            })
        }
        (None, Some("bicubic")) => Box::new(BicubicBaseline),
        (None, Some(other)) => {
            return Err(CliError::Config(format!(
                "unknown baseline {other:?}; only `bicubic` exists"
            )))
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --ckpt or --baseline is required".into(),
            ))
        }
    };

    let (images, skipped) = load_dataset(&args.data)?;
    if images.is_empty() && !grid.conditions.is_empty() {
        return Err(CliError::Config(format!(
            "no readable PNG images under {}",
            args.data.display()
        )));
    }
    let mut report = eval_grid(system.as_ref(), &images, &grid.conditions, args.seed)?;
    report.skipped_images = skipped;

    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&csv_path, report_to_csv(&report)?)?;
    std::fs::write(&json_path, report_to_json(&report)?)?;
    for cond in &report.conditions {
        eprintln!(
            "{}: mean PSNR {:.2} dB, mean SSIM {:.4} over {} images",
            cond.condition.id(),
            cond.mean_psnr_db,
            cond.mean_ssim,
            cond.scores.len()
        );
    }

    let manifest_path = args.out.with_extension("manifest.json");
    builder.write(
        &manifest_path,
        serde_json::json!({
            "system": report.system,
            "grid": raw.trim(),
        }),
        args.seed,
        vec![
            args.data.display().to_string(),
            args.grid.display().to_string(),
        ],
        vec![
            csv_path.display().to_string(),
            json_path.display().to_string(),
        ],
    )?;
    Ok(())
}
