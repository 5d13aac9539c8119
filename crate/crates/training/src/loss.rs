use schn_tensor::{add, l1_loss, scale, Element, Tensor};

use crate::config::TrainConfig;
use crate::error::{Result, TrainError};

/// Weighted multi-head objective: `lambda * sum of the first n-1 head
/// losses + the last head's loss`. Every head is L1 against the same HR
/// target. Returns the total as a graph scalar plus per-head values for
/// logging.
pub fn multi_head_loss<T: Element>(
    hr_outputs: &[Tensor<T>],
    target: &Tensor<T>,
    lambda: f64,
) -> Result<(Tensor<T>, Vec<f64>)> {
    if hr_outputs.is_empty() {
        return Err(TrainError::Config("no HR outputs to score".into()));
    }
    let mut per_head = Vec::with_capacity(hr_outputs.len());
    let mut losses = Vec::with_capacity(hr_outputs.len());
    for out in hr_outputs {
        let l = l1_loss(out, target).map_err(TrainError::Tensor)?;
        per_head.push(l.item().to_f64());
        losses.push(l);
    }
    let (last, intermediate) = losses.split_last().expect("non-empty");
    let mut total = last.clone();
    if !intermediate.is_empty() && lambda != 0.0 {
        let mut acc = intermediate[0].clone();
        for l in &intermediate[1..] {
            acc = add(&acc, l).map_err(TrainError::Tensor)?;
        }
        let weighted = scale(&acc, lambda).map_err(TrainError::Tensor)?;
        total = add(&weighted, &total).map_err(TrainError::Tensor)?;
    }
    Ok((total, per_head))
}

/// Piecewise-constant schedule: the initial rate halves every
/// `lr_halving_period` epochs.
pub fn lr_schedule(epoch: u32, config: &TrainConfig) -> f64 {
    config.lr_initial * 0.5f64.powi((epoch / config.lr_halving_period) as i32)
}
