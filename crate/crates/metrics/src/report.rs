//! Report emission: CSV (one row per image per condition, stable column
//! order) and nested JSON with aggregates.

use crate::error::Result;
use crate::grid::EvalReport;

pub fn report_to_csv(report: &EvalReport) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "condition",
        "scale",
        "kernel",
        "noise_level",
        "image",
        "psnr_db",
        "ssim",
    ])
    .map_err(|e| crate::MetricsError::Config(e.to_string()))?;
    for cond in &report.conditions {
        for score in &cond.scores {
            wtr.write_record([
                cond.condition.id(),
                cond.condition.scale.to_string(),
                cond.condition.kernel.label(),
                format!("{}", cond.condition.noise_level),
                score.image.clone(),
                format!("{:.4}", score.psnr_db),
                format!("{:.6}", score.ssim),
            ])
            .map_err(|e| crate::MetricsError::Config(e.to_string()))?;
        }
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| crate::MetricsError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn report_to_json(report: &EvalReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)
        .map_err(|e| crate::MetricsError::Config(e.to_string()))?)
}
