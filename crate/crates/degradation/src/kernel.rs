//! Anisotropic Gaussian blur kernels and image blurring.

use crate::error::{DegradationError, Result};
use crate::image_buffer::ImageBuffer;

/// Normalized anisotropic Gaussian convolution kernel.
///
/// Built by evaluating the rotated bivariate Gaussian density
/// `exp(-u' Sigma^-1 u / 2)` with `Sigma = R(theta) diag(sx^2, sy^2)
/// R(theta)'` at integer offsets from the kernel center, then normalizing to
/// sum 1. `sigma_x` is the width along the first principal axis (horizontal
/// for `theta = 0`).
#[derive(Debug, Clone)]
pub struct BlurKernel {
    size: usize,
    values: Vec<f64>,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub theta: f64,
}

impl BlurKernel {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, ky: usize, kx: usize) -> f64 {
        self.values[ky * self.size + kx]
    }
}

pub const DEFAULT_KERNEL_SIZE: usize = 15;

pub fn make_gaussian_kernel(
    sigma_x: f64,
    sigma_y: f64,
    theta: f64,
    size: usize,
) -> Result<BlurKernel> {
    if sigma_x <= 0.0 || sigma_y <= 0.0 {
        return Err(DegradationError::InvalidConfig(format!(
            "kernel widths must be positive, got ({sigma_x}, {sigma_y})"
        )));
    }
    if size == 0 || size % 2 == 0 {
        return Err(DegradationError::InvalidConfig(format!(
            "kernel size must be odd, got {size}"
        )));
    }
    let center = (size / 2) as f64;
    // Sigma^-1 = R diag(1/sx^2, 1/sy^2) R'
    let (sin, cos) = theta.sin_cos();
    let (ix, iy) = (1.0 / (sigma_x * sigma_x), 1.0 / (sigma_y * sigma_y));
    let a = cos * cos * ix + sin * sin * iy;
    let b = sin * cos * (ix - iy);
    let c = sin * sin * ix + cos * cos * iy;

    let mut values = vec![0.0; size * size];
    let mut sum = 0.0;
    for row in 0..size {
        for col in 0..size {
            let dx = col as f64 - center;
            let dy = row as f64 - center;
            let q = a * dx * dx + 2.0 * b * dx * dy + c * dy * dy;
            let v = (-0.5 * q).exp();
            values[row * size + col] = v;
            sum += v;
        }
    }
    for v in &mut values {
        *v /= sum;
    }
    Ok(BlurKernel {
        size,
        values,
        sigma_x,
        sigma_y,
        theta,
    })
}

/// Fold an out-of-range index back into `[0, n)` by symmetric (half-sample)
/// reflection: `[a b c]` pads to `... b a | a b c | c b ...`.
#[inline]
fn reflect(mut i: i64, n: i64) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Per-channel 2-D **true convolution** (kernel flipped) with symmetric
/// border padding. Same-size output; mean intensity is preserved up to the
/// border treatment because the kernel sums to 1.
pub fn blur(img: &ImageBuffer, kernel: &BlurKernel) -> ImageBuffer {
    let (h, w) = (img.height(), img.width());
    let size = kernel.size() as i64;
    let half = size / 2;
    let mut out = ImageBuffer::new(h, w);
    let src = img.data();
    let dst = out.data_mut();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = [0.0f64; ImageBuffer::CHANNELS];
            for ky in 0..size {
                // true convolution: source offset is center - kernel offset
                let sy = reflect(y - (ky - half), h as i64);
                for kx in 0..size {
                    let sx = reflect(x - (kx - half), w as i64);
                    let kv = kernel.get(ky as usize, kx as usize);
                    let base = (sy * w + sx) * ImageBuffer::CHANNELS;
                    for (ch, a) in acc.iter_mut().enumerate() {
                        *a += kv * src[base + ch] as f64;
                    }
                }
            }
            let base = (y as usize * w + x as usize) * ImageBuffer::CHANNELS;
            for (ch, a) in acc.iter().enumerate() {
                dst[base + ch] = *a as f32;
            }
        }
    }
    out
}
