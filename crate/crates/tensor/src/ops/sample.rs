//! Bilinear warping of a feature map by a per-pixel offset field.

use crate::element::Element;
use crate::error::Result;
use crate::ops::{dims4, shape_err};
use crate::tensor::Tensor;

/// Per-pixel interpolation stencil: integer coordinates of the top-left
/// neighbor and the fractional position inside the cell.
#[derive(Clone, Copy)]
struct Stencil<T> {
    xi: i64,
    yi: i64,
    fx: T,
    fy: T,
}

/// Corner displacements in (dx, dy) order: 00, 10, 01, 11.
const CORNERS: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

impl<T: Element> Stencil<T> {
    /// Flat index of a corner, or `None` when it lies outside
    /// `[0, w-1] x [0, h-1]` (the zero-border rule).
    #[inline]
    fn corner(&self, c: usize, h: usize, w: usize) -> Option<usize> {
        let (dx, dy) = CORNERS[c];
        let (x, y) = (self.xi + dx, self.yi + dy);
        if x >= 0 && x < w as i64 && y >= 0 && y < h as i64 {
            Some(y as usize * w + x as usize)
        } else {
            None
        }
    }

    #[inline]
    fn weights(&self) -> [T; 4] {
        let gx = T::ONE - self.fx;
        let gy = T::ONE - self.fy;
        [gx * gy, self.fx * gy, gx * self.fy, self.fx * self.fy]
    }
}

fn stencils<T: Element>(off_x: &[T], off_y: &[T], h: usize, w: usize) -> Vec<Stencil<T>> {
    let mut out = Vec::with_capacity(h * w);
    for y1 in 0..h {
        for x1 in 0..w {
            let idx = y1 * w + x1;
            let x = T::from_f64(x1 as f64) + off_x[idx];
            let y = T::from_f64(y1 as f64) + off_y[idx];
            let xt = x.floor_val();
            let yt = y.floor_val();
            out.push(Stencil {
                xi: xt.to_f64() as i64,
                yi: yt.to_f64() as i64,
                fx: x - xt,
                fy: y - yt,
            });
        }
    }
    out
}

/// Sample `feat` at `p + offset(p)` for every pixel `p` by bilinear
/// interpolation. `offsets` has two channels, x-offset then y-offset, in
/// pixel units; the same offset field is applied to every feature channel.
/// Any of the four interpolation neighbors lying outside
/// `[0, W-1] x [0, H-1]` contributes the value 0.
///
/// Differentiable w.r.t. both the features and the offsets. With all-zero
/// offsets the output equals the input exactly.
pub fn grid_sample_offsets<T: Element>(
    feat: &Tensor<T>,
    offsets: &Tensor<T>,
) -> Result<Tensor<T>> {
    let [n, c, h, w] = dims4(feat, "grid_sample_offsets")?;
    let [on, oc, oh, ow] = dims4(offsets, "grid_sample_offsets")?;
    if on != n || oc != 2 || oh != h || ow != w {
        return shape_err(
            "grid_sample_offsets",
            format!(
                "offsets shape {:?} incompatible with features {:?} (want [{n},2,{h},{w}])",
                offsets.shape(),
                feat.shape()
            ),
        );
    }
    let hw = h * w;
    let x = feat.data();
    let off = offsets.data();
    let mut out = vec![T::ZERO; n * c * hw];
    for ni in 0..n {
        let off_x = &off[ni * 2 * hw..][..hw];
        let off_y = &off[(ni * 2 + 1) * hw..][..hw];
        let st = stencils(off_x, off_y, h, w);
        for ci in 0..c {
            let plane = &x[(ni * c + ci) * hw..][..hw];
            let oplane = &mut out[(ni * c + ci) * hw..][..hw];
            for (o, s) in oplane.iter_mut().zip(&st) {
                let wts = s.weights();
                let mut acc = T::ZERO;
                for corner in 0..4 {
                    if let Some(idx) = s.corner(corner, h, w) {
                        acc += wts[corner] * plane[idx];
                    }
                }
                *o = acc;
            }
        }
    }

    let (fc, oc_t) = (feat.clone(), offsets.clone());
    Tensor::from_op(
        "grid_sample_offsets",
        feat.shape().to_vec(),
        out,
        vec![feat.clone(), offsets.clone()],
        Box::new(move |grad_out, needs| {
            let (x, off) = (fc.data(), oc_t.data());
            let mut d_feat = needs[0].then(|| vec![T::ZERO; x.len()]);
            let mut d_off = needs[1].then(|| vec![T::ZERO; off.len()]);
            for ni in 0..n {
                let off_x = &off[ni * 2 * hw..][..hw];
                let off_y = &off[(ni * 2 + 1) * hw..][..hw];
                let st = stencils(off_x, off_y, h, w);
                for ci in 0..c {
                    let plane = &x[(ni * c + ci) * hw..][..hw];
                    let gplane = &grad_out[(ni * c + ci) * hw..][..hw];
                    for (idx, s) in st.iter().enumerate() {
                        let g = gplane[idx];
                        let wts = s.weights();
                        if let Some(df) = d_feat.as_mut() {
                            let dplane = &mut df[(ni * c + ci) * hw..][..hw];
                            for corner in 0..4 {
                                if let Some(ci_flat) = s.corner(corner, h, w) {
                                    dplane[ci_flat] += wts[corner] * g;
                                }
                            }
                        }
                        if let Some(doff) = d_off.as_mut() {
                            // corner values with the zero-border rule applied
                            let p = |corner: usize| {
                                s.corner(corner, h, w)
                                    .map_or(T::ZERO, |ci_flat| plane[ci_flat])
                            };
                            let (gx, gy) = (T::ONE - s.fx, T::ONE - s.fy);
                            let d_dx = gy * (p(1) - p(0)) + s.fy * (p(3) - p(2));
                            let d_dy = gx * (p(2) - p(0)) + s.fx * (p(3) - p(1));
                            doff[ni * 2 * hw + idx] += d_dx * g;
                            doff[(ni * 2 + 1) * hw + idx] += d_dy * g;
                        }
                    }
                }
            }
            vec![d_feat, d_off]
        }),
    )
}
