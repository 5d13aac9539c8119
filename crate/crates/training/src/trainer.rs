//! The training loop. Every random draw derives functionally from
//! `(seed, domain, index)`, so two runs with one configuration are
//! bit-identical and a resumed run continues exactly where it stopped.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use schn_degradation::rng::derive_rng;
use schn_degradation::{augment, degrade, DegradeProvenance, ImageBuffer};
use schn_network::convert::images_to_tensor;
use schn_network::{read_checkpoint, write_checkpoint, ForwardMode, SchnModel};
use schn_tensor::{Adam, AdamHyperParams, MomentSlot, Tensor, TensorError};

use crate::config::{TrainConfig, Variant};
use crate::error::{Result, TrainError};
use crate::loss::{lr_schedule, multi_head_loss};

/// One crop position in the patch manifest.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PatchRef {
    pub image_idx: usize,
    pub y: usize,
    pub x: usize,
}

/// HR images plus the fixed patch manifest built from them. An epoch visits
/// every patch once with fresh random degradations.
pub struct PatchSet {
    pub images: Vec<(String, ImageBuffer)>,
    pub refs: Vec<PatchRef>,
    pub skipped_undersized: usize,
}

pub fn load_patch_set(config: &TrainConfig) -> Result<PatchSet> {
    let mut paths: Vec<_> = std::fs::read_dir(&config.hr_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    let mut images = Vec::new();
    let mut refs = Vec::new();
    let mut skipped = 0;
    for path in paths {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let img = ImageBuffer::load_png(&path)?;
        match schn_degradation::patch_positions(
            img.height(),
            img.width(),
            config.patch_size,
            config.stride,
        ) {
            Some(positions) => {
                let image_idx = images.len();
                for (y, x) in positions {
                    refs.push(PatchRef { image_idx, y, x });
                }
                images.push((name, img));
            }
            None => skipped += 1,
        }
    }
    if refs.is_empty() {
        return Err(TrainError::Config(format!(
            "no usable {0}x{0} patches under {1}",
            config.patch_size,
            config.hr_dir.display()
        )));
    }
    Ok(PatchSet {
        images,
        refs,
        skipped_undersized: skipped,
    })
}

/// Provenance of one sample inside a training batch; the non-finite abort
/// dumps these so the batch can be regenerated exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchProvenance {
    pub source: String,
    pub offset_y: usize,
    pub offset_x: usize,
    pub augmentation: u8,
    pub degradation: DegradeProvenance,
}

/// Per-step log record (newline-delimited JSON in training logs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub epoch: u32,
    pub lr: f64,
    pub per_head: Vec<f64>,
    pub total: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrainState {
    epoch: u32,
    global_step: u64,
    pos_in_epoch: usize,
    adam_step_count: u64,
    loss_sums: Vec<f64>,
    loss_count: u64,
    config: TrainConfig,
}

pub struct Trainer {
    pub config: TrainConfig,
    pub model: SchnModel<f32>,
    adam: Adam<f32>,
    patches: PatchSet,
    order: Vec<usize>,
    pos_in_epoch: usize,
    pub epoch: u32,
    pub global_step: u64,
    /// Per-head running sums and the number of steps behind them.
    pub loss_sums: Vec<f64>,
    pub loss_count: u64,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let patches = load_patch_set(&config)?;
        let model = SchnModel::init_random(config.model, config.seed)?;
        let sizes: Vec<usize> = model.named_params().iter().map(|(_, t)| t.numel()).collect();
        let adam = Adam::new(AdamHyperParams::default(), config.lr_initial, &sizes);
        Ok(Trainer {
            config,
            model,
            adam,
            patches,
            order: Vec::new(),
            pos_in_epoch: 0,
            epoch: 0,
            global_step: 0,
            loss_sums: Vec::new(),
            loss_count: 0,
        })
    }

    pub fn finished(&self) -> bool {
        if let Some(max_steps) = self.config.max_steps {
            if self.global_step >= max_steps {
                return true;
            }
        }
        self.epoch >= self.config.max_epochs
    }

    fn epoch_order(&self) -> Vec<usize> {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..self.patches.refs.len()).collect();
        let mut rng = derive_rng(self.config.seed, "shuffle", self.epoch as u64);
        order.shuffle(&mut rng);
        order
    }

    /// One optimizer step over the next batch of the epoch.
    pub fn step(&mut self) -> Result<StepRecord> {
        let start = Instant::now();
        // the order is a pure function of (seed, epoch), so a resumed run
        // regenerates the same permutation it stopped inside
        if self.pos_in_epoch == 0 || self.order.len() != self.patches.refs.len() {
            self.order = self.epoch_order();
        }
        let epoch = self.epoch;
        let lr = lr_schedule(epoch, &self.config);
        self.adam.lr = lr;

        let n = self.patches.refs.len();
        let take = self.config.batch_size.min(n - self.pos_in_epoch);
        let mut inputs = Vec::with_capacity(take);
        let mut targets = Vec::with_capacity(take);
        let mut batch_provenance = Vec::with_capacity(take);
        for slot in 0..take {
            let patch_ref = self.patches.refs[self.order[self.pos_in_epoch + slot]];
            let (name, image) = &self.patches.images[patch_ref.image_idx];
            let crop = image.crop(
                patch_ref.y,
                patch_ref.x,
                self.config.patch_size,
                self.config.patch_size,
            )?;
            let mut rng = derive_rng(
                self.config.seed,
                "sample",
                self.global_step * self.config.batch_size as u64 + slot as u64,
            );
            let (hr, aug_id) = augment(&crop, &mut rng)?;
            let degraded = degrade(&hr, &self.config.degradation, &mut rng)?;
            batch_provenance.push(BatchProvenance {
                source: name.clone(),
                offset_y: patch_ref.y,
                offset_x: patch_ref.x,
                augmentation: aug_id,
                degradation: degraded.provenance.clone(),
            });
            inputs.push(match self.config.variant {
                Variant::NF => degraded.lr_clean,
                Variant::AN => degraded.lr_noisy,
            });
            targets.push(hr);
        }

        let input_refs: Vec<&ImageBuffer> = inputs.iter().collect();
        let target_refs: Vec<&ImageBuffer> = targets.iter().collect();
        let step = self.global_step;
        let non_finite = |e: TensorError, batch: &[BatchProvenance]| match e {
            TensorError::NonFinite { .. } => TrainError::NonFinite {
                step,
                batch: batch.to_vec(),
            },
            other => TrainError::Tensor(other),
        };

        let input = images_to_tensor(&input_refs)?;
        let target = images_to_tensor(&target_refs)?;
        let out = self
            .model
            .forward(&input, ForwardMode::AllHeads)
            .map_err(|e| match e {
                schn_network::NetworkError::Tensor(t) => non_finite(t, &batch_provenance),
                other => TrainError::Network(other),
            })?;
        let (total, per_head) =
            multi_head_loss(&out.hr_outputs, &target, self.config.lambda).map_err(|e| match e {
                TrainError::Tensor(t) => non_finite(t, &batch_provenance),
                other => other,
            })?;
        let total_value = total.item() as f64;
        total.backward().map_err(TrainError::Tensor)?;

        let mut named = self.model.named_params_mut();
        let mut refs: Vec<&mut Tensor<f32>> = named.iter_mut().map(|(_, t)| &mut **t).collect();
        self.adam.step(&mut refs).map_err(TrainError::Tensor)?;

        if self.loss_sums.len() != per_head.len() {
            self.loss_sums = vec![0.0; per_head.len()];
        }
        for (sum, v) in self.loss_sums.iter_mut().zip(&per_head) {
            *sum += v;
        }
        self.loss_count += 1;

        self.global_step += 1;
        self.pos_in_epoch += take;
        if self.pos_in_epoch >= n {
            self.pos_in_epoch = 0;
            self.epoch += 1;
        }
        Ok(StepRecord {
            step,
            epoch,
            lr,
            per_head,
            total: total_value,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Write a training checkpoint: model parameters, Adam moments, and the
    /// loop counters. Byte-exact restore.
    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        save_train_checkpoint(self, path)
    }
}

pub fn save_train_checkpoint(trainer: &Trainer, path: &Path) -> Result<()> {
    let params = trainer.model.named_params();
    let mut tensors: Vec<(String, Vec<usize>, Vec<f32>)> = Vec::new();
    for (name, t) in &params {
        tensors.push((name.clone(), t.shape().to_vec(), t.data().to_vec()));
    }
    for ((name, t), slot) in params.iter().zip(trainer.adam.slots()) {
        tensors.push((format!("adam.m.{name}"), t.shape().to_vec(), slot.m.clone()));
        tensors.push((format!("adam.v.{name}"), t.shape().to_vec(), slot.v.clone()));
    }
    let state = TrainState {
        epoch: trainer.epoch,
        global_step: trainer.global_step,
        pos_in_epoch: trainer.pos_in_epoch,
        adam_step_count: trainer.adam.step_count(),
        loss_sums: trainer.loss_sums.clone(),
        loss_count: trainer.loss_count,
        config: trainer.config.clone(),
    };
    let records: Vec<(String, Vec<usize>, &[f32])> = tensors
        .iter()
        .map(|(n, s, d)| (n.clone(), s.clone(), d.as_slice()))
        .collect();
    write_checkpoint(
        path,
        trainer.model.config,
        &records,
        Some(serde_json::to_value(&state)?),
    )?;
    Ok(())
}

/// Rebuild a trainer from a training checkpoint. The configuration must be
/// identical to the checkpointed one; the continuation is bit-exact.
pub fn resume_trainer(path: &Path, config: TrainConfig) -> Result<Trainer> {
    config.validate()?;
    let (header, buffers) = read_checkpoint(path)?;
    let state: TrainState = serde_json::from_value(
        header
            .train_state
            .clone()
            .ok_or_else(|| TrainError::Config("checkpoint has no training state".into()))?,
    )?;
    if serde_json::to_value(&state.config)? != serde_json::to_value(&config)? {
        return Err(TrainError::Config(
            "resume configuration differs from the checkpointed one".into(),
        ));
    }

    let mut by_name: std::collections::HashMap<String, Vec<f32>> = header
        .tensors
        .iter()
        .zip(buffers)
        .map(|(r, b)| (r.name.clone(), b))
        .collect();

    let mut model = SchnModel::init_zeros(header.config)?;
    let mut slots = Vec::new();
    for (name, slot) in model.named_params_mut() {
        let data = by_name
            .remove(&name)
            .ok_or_else(|| TrainError::Config(format!("checkpoint missing tensor {name}")))?;
        let m = by_name
            .remove(&format!("adam.m.{name}"))
            .ok_or_else(|| TrainError::Config(format!("checkpoint missing adam.m.{name}")))?;
        let v = by_name
            .remove(&format!("adam.v.{name}"))
            .ok_or_else(|| TrainError::Config(format!("checkpoint missing adam.v.{name}")))?;
        let shape = slot.shape().to_vec();
        *slot = Tensor::param(data, &shape).map_err(TrainError::Tensor)?;
        slots.push(MomentSlot { m, v });
    }

    let patches = load_patch_set(&config)?;
    let adam = Adam::from_state(
        AdamHyperParams::default(),
        lr_schedule(state.epoch, &config),
        state.adam_step_count,
        slots,
    );
    Ok(Trainer {
        config,
        model,
        adam,
        patches,
        order: Vec::new(),
        pos_in_epoch: state.pos_in_epoch,
        epoch: state.epoch,
        global_step: state.global_step,
        loss_sums: state.loss_sums,
        loss_count: state.loss_count,
    })
}
