//! Separable bicubic resampling with the Keys kernel (a = -0.5).
//!
//! Follows the convention of the standard super-resolution literature
//! resizer: center-aligned coordinate mapping, edge replication at borders
//! (out-of-range taps re-read the edge sample, with weights normalized to
//! sum 1), and footprint-scaled antialiasing when downscaling — the kernel
//! support widens by the inverse scale so the filter low-passes before
//! decimation. Height is resampled first, then width. All arithmetic is
//! double precision.

use serde::{Deserialize, Serialize};

use crate::error::{DegradationError, Result};
use crate::image_buffer::ImageBuffer;

/// Rational resampling factor `num/den`. Output length is
/// `ceil(in * num / den)` computed in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub num: u32,
    pub den: u32,
}

impl Scale {
    pub fn up(factor: u32) -> Self {
        Scale {
            num: factor,
            den: 1,
        }
    }

    pub fn down(factor: u32) -> Self {
        Scale {
            num: 1,
            den: factor,
        }
    }

    pub fn identity() -> Self {
        Scale { num: 1, den: 1 }
    }

    pub fn ratio(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn apply(self, len: usize) -> usize {
        (len * self.num as usize).div_ceil(self.den as usize)
    }
}

/// Keys cubic interpolation kernel, a = -0.5, support 2.
fn keys_cubic(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 1.0 {
        (1.5 * ax - 2.5) * ax * ax + 1.0
    } else if ax < 2.0 {
        ((-0.5 * ax + 2.5) * ax - 4.0) * ax + 2.0
    } else {
        0.0
    }
}

const KERNEL_WIDTH: f64 = 4.0;

/// Per-output-pixel filter taps along one dimension.
struct Contributions {
    taps: usize,
    /// `out_len * taps` weights, normalized to sum 1 per output pixel.
    weights: Vec<f64>,
    /// `out_len * taps` source indices, clamped to `[0, in_len)`.
    indices: Vec<usize>,
}

fn contributions(in_len: usize, out_len: usize, scale: f64, antialias: bool) -> Contributions {
    let (kscale, width) = if scale < 1.0 && antialias {
        (scale, KERNEL_WIDTH / scale)
    } else {
        (1.0, KERNEL_WIDTH)
    };
    let taps = width.ceil() as usize + 2;
    let mut weights = vec![0.0; out_len * taps];
    let mut indices = vec![0usize; out_len * taps];
    for i in 0..out_len {
        // center-aligned mapping of output pixel i onto input coordinates
        let u = (i as f64 + 0.5) / scale - 0.5;
        let left = (u - width / 2.0).floor() as i64;
        let row_w = &mut weights[i * taps..][..taps];
        let row_i = &mut indices[i * taps..][..taps];
        let mut sum = 0.0;
        for t in 0..taps {
            let idx = left + t as i64;
            let w = kscale * keys_cubic(kscale * (u - idx as f64));
            row_w[t] = w;
            row_i[t] = idx.clamp(0, in_len as i64 - 1) as usize;
            sum += w;
        }
        for w in row_w.iter_mut() {
            *w /= sum;
        }
    }
    Contributions {
        taps,
        weights,
        indices,
    }
}

/// Resample one plane along the leading (row) dimension.
fn resample_rows(src: &[f64], in_h: usize, w: usize, con: &Contributions) -> Vec<f64> {
    let out_h = con.weights.len() / con.taps;
    let mut out = vec![0.0; out_h * w];
    debug_assert_eq!(src.len(), in_h * w);
    for oy in 0..out_h {
        let ws = &con.weights[oy * con.taps..][..con.taps];
        let is = &con.indices[oy * con.taps..][..con.taps];
        let orow = &mut out[oy * w..][..w];
        for (wv, &iy) in ws.iter().zip(is) {
            let irow = &src[iy * w..][..w];
            for (o, &v) in orow.iter_mut().zip(irow) {
                *o += wv * v;
            }
        }
    }
    out
}

fn transpose(src: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        for x in 0..w {
            out[x * h + y] = src[y * w + x];
        }
    }
    out
}

/// Resample a single `in_h x in_w` plane to `out_h x out_w`, height first.
pub fn resize_plane(
    src: &[f64],
    in_h: usize,
    in_w: usize,
    out_h: usize,
    out_w: usize,
    scale_h: f64,
    scale_w: f64,
    antialias: bool,
) -> Vec<f64> {
    let rows = contributions(in_h, out_h, scale_h, antialias);
    let tmp = resample_rows(src, in_h, in_w, &rows);
    // columns: transpose, resample the leading dimension, transpose back
    let cols = contributions(in_w, out_w, scale_w, antialias);
    let t = transpose(&tmp, out_h, in_w);
    let resampled = resample_rows(&t, in_w, out_h, &cols);
    transpose(&resampled, out_w, out_h)
}

/// Bicubic resize of an RGB image by a rational factor.
///
/// Downscaling requires `antialias`; upscaling ignores it (the plain kernel
/// is already correct when no decimation happens).
pub fn bicubic_resize(img: &ImageBuffer, scale: Scale, antialias: bool) -> Result<ImageBuffer> {
    if scale.num == 0 || scale.den == 0 {
        return Err(DegradationError::InvalidConfig(
            "scale numerator/denominator must be nonzero".into(),
        ));
    }
    if scale.ratio() < 1.0 && !antialias {
        return Err(DegradationError::InvalidConfig(
            "downscaling requires antialiasing".into(),
        ));
    }
    let (h, w) = (img.height(), img.width());
    let (out_h, out_w) = (scale.apply(h), scale.apply(w));
    if out_h == 0 || out_w == 0 {
        return Err(DegradationError::InvalidConfig(format!(
            "output dimensions {out_h}x{out_w} too small"
        )));
    }
    if scale.num == scale.den {
        return Ok(img.clone());
    }
    let ratio = scale.ratio();
    let mut out = ImageBuffer::new(out_h, out_w);
    for c in 0..ImageBuffer::CHANNELS {
        let plane: Vec<f64> = (0..h * w)
            .map(|i| img.data()[i * ImageBuffer::CHANNELS + c] as f64)
            .collect();
        let res = resize_plane(&plane, h, w, out_h, out_w, ratio, ratio, antialias);
        for (i, v) in res.iter().enumerate() {
            out.data_mut()[i * ImageBuffer::CHANNELS + c] = *v as f32;
        }
    }
    Ok(out)
}
