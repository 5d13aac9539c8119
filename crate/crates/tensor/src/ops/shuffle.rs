//! Depth-to-space rearrangement (sub-pixel convolution upscaling step) and
//! its inverse.

use crate::element::Element;
use crate::error::Result;
use crate::ops::{dims4, shape_err};
use crate::tensor::Tensor;

/// Map `[n, c*r^2, h, w]` positions to `[n, c, h*r, w*r]`. Bijective; used
/// forward by `pixel_shuffle` and backward by `pixel_unshuffle`.
fn shuffle_data<T: Element>(
    x: &[T],
    n: usize,
    c_out: usize,
    h: usize,
    w: usize,
    r: usize,
) -> Vec<T> {
    let (hr, wr) = (h * r, w * r);
    let mut out = vec![T::ZERO; x.len()];
    for ni in 0..n {
        for co in 0..c_out {
            for dy in 0..r {
                for dx in 0..r {
                    let ci = (co * r + dy) * r + dx;
                    let iplane = &x[((ni * c_out * r * r) + ci) * h * w..][..h * w];
                    for y in 0..h {
                        let orow_base = ((ni * c_out + co) * hr + (y * r + dy)) * wr + dx;
                        let irow = &iplane[y * w..][..w];
                        for (xi, &v) in irow.iter().enumerate() {
                            out[orow_base + xi * r] = v;
                        }
                    }
                }
            }
        }
    }
    out
}

fn unshuffle_data<T: Element>(
    y: &[T],
    n: usize,
    c_out: usize,
    h: usize,
    w: usize,
    r: usize,
) -> Vec<T> {
    let (hr, wr) = (h * r, w * r);
    let mut out = vec![T::ZERO; y.len()];
    for ni in 0..n {
        for co in 0..c_out {
            for dy in 0..r {
                for dx in 0..r {
                    let ci = (co * r + dy) * r + dx;
                    let oplane = &mut out[((ni * c_out * r * r) + ci) * h * w..][..h * w];
                    for yy in 0..h {
                        let irow_base = ((ni * c_out + co) * hr + (yy * r + dy)) * wr + dx;
                        for xi in 0..w {
                            oplane[yy * w + xi] = y[irow_base + xi * r];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Depth-to-space: `[n, c*r^2, h, w] -> [n, c, h*r, w*r]`. The gradient is
/// the inverse rearrangement, so the op is exactly volume-preserving.
pub fn pixel_shuffle<T: Element>(x: &Tensor<T>, r: usize) -> Result<Tensor<T>> {
    let [n, c, h, w] = dims4(x, "pixel_shuffle")?;
    if r == 0 || c % (r * r) != 0 {
        return shape_err(
            "pixel_shuffle",
            format!("channel count {c} not divisible by r^2 = {}", r * r),
        );
    }
    let c_out = c / (r * r);
    let out = shuffle_data(x.data(), n, c_out, h, w, r);
    Tensor::from_op(
        "pixel_shuffle",
        vec![n, c_out, h * r, w * r],
        out,
        vec![x.clone()],
        Box::new(move |grad_out, needs| {
            let dx = needs[0].then(|| unshuffle_data(grad_out, n, c_out, h, w, r));
            vec![dx]
        }),
    )
}

/// Space-to-depth, the exact inverse of [`pixel_shuffle`].
pub fn pixel_unshuffle<T: Element>(y: &Tensor<T>, r: usize) -> Result<Tensor<T>> {
    let [n, c, hr, wr] = dims4(y, "pixel_unshuffle")?;
    if r == 0 || hr % r != 0 || wr % r != 0 {
        return shape_err(
            "pixel_unshuffle",
            format!("spatial dims {hr}x{wr} not divisible by r = {r}"),
        );
    }
    let (h, w) = (hr / r, wr / r);
    let out = unshuffle_data(y.data(), n, c, h, w, r);
    Tensor::from_op(
        "pixel_unshuffle",
        vec![n, c * r * r, h, w],
        out,
        vec![y.clone()],
        Box::new(move |grad_out, needs| {
            let dy = needs[0].then(|| shuffle_data(grad_out, n, c, h, w, r));
            vec![dy]
        }),
    )
}
