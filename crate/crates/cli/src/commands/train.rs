use std::io::Write;

use schn_training::{resume_trainer, TrainConfig, TrainError, Trainer};

use crate::errors::CliError;
use crate::manifest::ManifestBuilder;
use crate::TrainArgs;

pub fn run(args: TrainArgs) -> Result<(), CliError> {
    let builder = ManifestBuilder::new("train");
    let config = TrainConfig::load(&args.config)?;
    std::fs::create_dir_all(&args.out)?;

    let mut trainer = match &args.resume {
        Some(ckpt) => resume_trainer(ckpt, config.clone())?,
        None => Trainer::new(config.clone())?,
    };

    let log_path = args.out.join("train_log.jsonl");
    let mut log = std::io::BufWriter::new(
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)?,
    );

    let mut last_epoch = trainer.epoch;
    while !trainer.finished() {
        match trainer.step() {
            Ok(record) => {
                writeln!(log, "{}", serde_json::to_string(&record)?)?;
                if record.step % 50 == 0 {
                    eprintln!(
                        "step {} epoch {} lr {:.3e} total {:.5}",
                        record.step, record.epoch, record.lr, record.total
                    );
                }
                if trainer.epoch != last_epoch {
                    last_epoch = trainer.epoch;
                    let path = args.out.join(format!("ckpt_epoch{:03}.schn", trainer.epoch));
                    trainer.save_checkpoint(&path)?;
                    trainer.save_checkpoint(&args.out.join("latest.schn"))?;
                }
            }
            Err(TrainError::NonFinite { step, batch }) => {
                // dump the offending batch manifest for replay, then abort
                let dump = args.out.join("nonfinite_batch.json");
                std::fs::write(
                    &dump,
                    serde_json::to_string_pretty(&serde_json::json!({
                        "step": step,
                        "batch": batch,
                    }))?,
                )?;
                log.flush()?;
                return Err(CliError::Runtime(format!(
                    "non-finite loss at step {step}; batch manifest dumped to {}",
                    dump.display()
                )));
            }
            Err(other) => return Err(other.into()),
        }
    }
    log.flush()?;

    let final_path = args.out.join("final.schn");
    trainer.save_checkpoint(&final_path)?;
    trainer.save_checkpoint(&args.out.join("latest.schn"))?;
    eprintln!(
        "finished at step {} (epoch {})",
        trainer.global_step, trainer.epoch
    );

    builder.write(
        &args.out.join("manifest.json"),
        serde_json::to_value(&config)?,
        config.seed,
        vec![
            args.config.display().to_string(),
            config.hr_dir.display().to_string(),
        ],
        vec![
            final_path.display().to_string(),
            log_path.display().to_string(),
        ],
    )?;
    Ok(())
}
