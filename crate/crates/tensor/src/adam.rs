//! Bias-corrected Adam optimizer.

use crate::element::Element;
use crate::error::{Result, TensorError};
use crate::tensor::Tensor;

/// Adam hyperparameters. Defaults are beta1 = 0.9, beta2 = 0.999,
/// epsilon = 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyperParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyperParams {
    fn default() -> Self {
        AdamHyperParams {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment buffers of one parameter.
#[derive(Debug, Clone)]
pub struct MomentSlot<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
}

/// Adam optimizer state over an ordered parameter list. Moment buffers are
/// shape-congruent with their parameter; the step count increases by exactly
/// one per [`Adam::step`].
pub struct Adam<T: Element> {
    pub hp: AdamHyperParams,
    pub lr: f64,
    step_count: u64,
    slots: Vec<MomentSlot<T>>,
}

impl<T: Element> Adam<T> {
    pub fn new(hp: AdamHyperParams, lr: f64, param_sizes: &[usize]) -> Self {
        let slots = param_sizes
            .iter()
            .map(|&len| MomentSlot {
                m: vec![T::ZERO; len],
                v: vec![T::ZERO; len],
            })
            .collect();
        Adam {
            hp,
            lr,
            step_count: 0,
            slots,
        }
    }

    /// Rebuild an optimizer from checkpointed state.
    pub fn from_state(
        hp: AdamHyperParams,
        lr: f64,
        step_count: u64,
        slots: Vec<MomentSlot<T>>,
    ) -> Self {
        Adam {
            hp,
            lr,
            step_count,
            slots,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn slots(&self) -> &[MomentSlot<T>] {
        &self.slots
    }

    /// One bias-corrected update. Each parameter tensor is replaced by a
    /// fresh leaf holding the updated values; gradients are read from the
    /// old leaves (zero when a parameter never received one).
    pub fn step(&mut self, params: &mut [&mut Tensor<T>]) -> Result<()> {
        if params.len() != self.slots.len() {
            return Err(TensorError::InvalidConfig(format!(
                "adam has {} slots but got {} parameters",
                self.slots.len(),
                params.len()
            )));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - self.hp.beta1.powi(t);
        let bc2 = 1.0 - self.hp.beta2.powi(t);

        for (param, slot) in params.iter_mut().zip(&mut self.slots) {
            if param.numel() != slot.m.len() {
                return Err(TensorError::InvalidConfig(format!(
                    "adam slot size {} != parameter size {}",
                    slot.m.len(),
                    param.numel()
                )));
            }
            let grad = param.grad_or_zeros();
            let mut data: Vec<T> = param.data().to_vec();
            for i in 0..data.len() {
                let g = grad[i].to_f64();
                let m = self.hp.beta1 * slot.m[i].to_f64() + (1.0 - self.hp.beta1) * g;
                let v = self.hp.beta2 * slot.v[i].to_f64() + (1.0 - self.hp.beta2) * g * g;
                slot.m[i] = T::from_f64(m);
                slot.v[i] = T::from_f64(v);
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                let update = self.lr * m_hat / (v_hat.sqrt() + self.hp.epsilon);
                data[i] = T::from_f64(data[i].to_f64() - update);
            }
            **param = Tensor::param(data, &param.shape().to_vec())?;
        }
        Ok(())
    }
}
