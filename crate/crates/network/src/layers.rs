use rand::Rng;
use rand_chacha::ChaCha8Rng;
use schn_tensor::{conv2d, Element, Tensor};

use crate::error::Result;

/// A 3x3 same-padding convolution layer's parameters.
#[derive(Clone)]
pub struct Conv2dLayer<T: Element> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
    pub in_ch: usize,
    pub out_ch: usize,
    pub ksize: usize,
}

impl<T: Element> Conv2dLayer<T> {
    /// Fan-in-scaled uniform weights `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`,
    /// zero bias.
    pub fn random(in_ch: usize, out_ch: usize, ksize: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let fan_in = (in_ch * ksize * ksize) as f64;
        let bound = 1.0 / fan_in.sqrt();
        let weight: Vec<T> = (0..out_ch * in_ch * ksize * ksize)
            .map(|_| T::from_f64(rng.random_range(-bound..bound)))
            .collect();
        Ok(Conv2dLayer {
            weight: Tensor::param(weight, &[out_ch, in_ch, ksize, ksize])?,
            bias: Tensor::param(vec![T::ZERO; out_ch], &[out_ch])?,
            in_ch,
            out_ch,
            ksize,
        })
    }

    /// All-zero weights and bias (the offset-producing convolutions start at
    /// the identity warp).
    pub fn zeros(in_ch: usize, out_ch: usize, ksize: usize) -> Result<Self> {
        Ok(Conv2dLayer {
            weight: Tensor::param(
                vec![T::ZERO; out_ch * in_ch * ksize * ksize],
                &[out_ch, in_ch, ksize, ksize],
            )?,
            bias: Tensor::param(vec![T::ZERO; out_ch], &[out_ch])?,
            in_ch,
            out_ch,
            ksize,
        })
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        Ok(conv2d(x, &self.weight, &self.bias, self.ksize / 2)?)
    }

    pub fn param_count(&self) -> u64 {
        (self.out_ch * self.in_ch * self.ksize * self.ksize + self.out_ch) as u64
    }

    /// Ordered (suffix, tensor) pairs for checkpointing/optimization.
    pub fn named_params_mut(&mut self) -> [(&'static str, &mut Tensor<T>); 2] {
        [("weight", &mut self.weight), ("bias", &mut self.bias)]
    }
}
