use std::path::PathBuf;

use serde::Deserialize;

use schn_metrics::{eval_grid, load_dataset, EvalCondition};
use schn_training::{TrainConfig, Trainer};

use crate::errors::CliError;
use crate::manifest::ManifestBuilder;
use crate::upscaler::ModelUpscaler;
use crate::AblateArgs;

/// Ablation harness config: a base training config, the evaluation dataset
/// and condition, and a per-cell step budget. Every cell trains with the
/// same seed and budget.
#[derive(Deserialize)]
struct AblateConfig {
    train: TrainConfig,
    eval_data: PathBuf,
    condition: EvalCondition,
    steps_per_cell: u64,
}

/// Parse `maps=0..3,modules=0,1,4,8,12` into the two axes. Values accept
/// `a..b` inclusive ranges or comma lists.
fn parse_grid(spec: &str) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    let mut maps = None;
    let mut modules = None;
    // split on commas that follow `key=`, keeping list values intact by
    // scanning for the two keys explicitly
    let spec = spec.trim();
    let keys = ["maps=", "modules="];
    let mut segments: Vec<(usize, &str)> = Vec::new();
    for key in keys {
        if let Some(pos) = spec.find(key) {
            segments.push((pos, key));
        } else {
            return Err(CliError::Config(format!("grid spec missing {key}")));
        }
    }
    segments.sort();
    for (i, (pos, key)) in segments.iter().enumerate() {
        let start = pos + key.len();
        let end = segments
            .get(i + 1)
            .map(|(p, _)| p - 1) // the separating comma
            .unwrap_or(spec.len());
        let value = &spec[start..end];
        let parsed = parse_axis(value)?;
        match *key {
            "maps=" => maps = Some(parsed),
            _ => modules = Some(parsed),
        }
    }
    Ok((maps.unwrap(), modules.unwrap()))
}

fn parse_axis(value: &str) -> Result<Vec<usize>, CliError> {
    if let Some((lo, hi)) = value.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad range start {lo:?}")))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad range end {hi:?}")))?;
        if hi < lo {
            return Err(CliError::Config(format!("empty range {value:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad grid value {v:?}")))
        })
        .collect()
}

pub fn run(args: AblateArgs) -> Result<(), CliError> {
    let builder = ManifestBuilder::new("ablate");
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read config: {e}")))?;
    let config: AblateConfig = serde_json::from_str(&raw)?;
    let (maps_axis, modules_axis) = parse_grid(&args.grid)?;
    std::fs::create_dir_all(&args.out)?;

    let (images, _) = load_dataset(&config.eval_data)?;
    if images.is_empty() {
        return Err(CliError::Config(format!(
            "no readable PNG images under {}",
            config.eval_data.display()
        )));
    }

    let mut rows = Vec::new();
    for &n_maps in &maps_axis {
        let mut row = Vec::new();
        for &n_modules in &modules_axis {
            if n_modules == 0 && n_maps > 0 {
                // hallucination maps need at least one module
                row.push("-/-".to_string());
                continue;
            }
            let mut cell_config = config.train.clone();
            cell_config.model.n_maps = n_maps;
            cell_config.model.n_modules = n_modules;
            cell_config.max_steps = Some(config.steps_per_cell);

            let mut trainer = Trainer::new(cell_config)?;
            while !trainer.finished() {
                trainer.step().map_err(CliError::from)?;
            }
            let ckpt = args.out.join(format!("cell_m{n_maps}_n{n_modules}.schn"));
            trainer.save_checkpoint(&ckpt)?;

            let system = ModelUpscaler {
                label: format!("m{n_maps}_n{n_modules}"),
                model: trainer.model,
            };
            let report = eval_grid(&system, &images, &[config.condition], config.train.seed)?;
            let cond = &report.conditions[0];
            row.push(format!("{:.2}/{:.4}", cond.mean_psnr_db, cond.mean_ssim));
            eprintln!(
                "cell maps={n_maps} modules={n_modules}: {:.2} dB / {:.4}",
                cond.mean_psnr_db, cond.mean_ssim
            );
        }
        rows.push(row);
    }

    // Table-shaped CSV: one row per map count, one column per module count
    let mut csv = String::new();
    csv.push_str("maps\\modules");
    for m in &modules_axis {
        csv.push_str(&format!(",{m}"));
    }
    csv.push('\n');
    for (n_maps, row) in maps_axis.iter().zip(&rows) {
        csv.push_str(&n_maps.to_string());
        for cell in row {
            csv.push(',');
            csv.push_str(cell);
        }
        csv.push('\n');
    }
    let csv_path = args.out.join("ablation.csv");
    std::fs::write(&csv_path, &csv)?;

    builder.write(
        &args.out.join("manifest.json"),
        serde_json::json!({
            "grid": args.grid,
            "ablate_config": serde_json::from_str::<serde_json::Value>(&raw)?,
        }),
        config.train.seed,
        vec![args.config.display().to_string()],
        vec![csv_path.display().to_string()],
    )?;
    Ok(())
}
