//! 2-D convolution (cross-correlation, stride 1, symmetric zero padding).

use crate::element::Element;
use crate::error::Result;
use crate::ops::{dims4, shape_err};
use crate::tensor::Tensor;

struct ConvDims {
    n: usize,
    cin: usize,
    h: usize,
    w: usize,
    cout: usize,
    kh: usize,
    kw: usize,
    pad: usize,
    oh: usize,
    ow: usize,
}

/// `out[n,co] = bias[co] + sum_ci input[n,ci] * weight[co,ci]`, stride 1,
/// zero padding of `pad` pixels on every side. Kernels are applied as
/// cross-correlation (no flip), the usual deep-learning convention.
///
/// With `pad = (k-1)/2` and odd `k` the output keeps the input's spatial
/// size. Differentiable w.r.t. input, weight, and bias.
pub fn conv2d<T: Element>(
    input: &Tensor<T>,
    weight: &Tensor<T>,
    bias: &Tensor<T>,
    pad: usize,
) -> Result<Tensor<T>> {
    let [n, cin, h, w] = dims4(input, "conv2d")?;
    let [cout, wcin, kh, kw] = dims4(weight, "conv2d")?;
    if wcin != cin {
        return shape_err(
            "conv2d",
            format!("input has {cin} channels but weight expects {wcin}"),
        );
    }
    if bias.shape() != [cout] {
        return shape_err(
            "conv2d",
            format!("bias shape {:?} != [{cout}]", bias.shape()),
        );
    }
    if h + 2 * pad < kh || w + 2 * pad < kw {
        return shape_err(
            "conv2d",
            format!("kernel {kh}x{kw} larger than padded input {h}x{w} (pad {pad})"),
        );
    }
    let dims = ConvDims {
        n,
        cin,
        h,
        w,
        cout,
        kh,
        kw,
        pad,
        oh: h + 2 * pad - kh + 1,
        ow: w + 2 * pad - kw + 1,
    };

    let out = forward(input.data(), weight.data(), bias.data(), &dims);

    let (inp, wgt) = (input.clone(), weight.clone());
    let out_shape = vec![dims.n, dims.cout, dims.oh, dims.ow];
    Tensor::from_op(
        "conv2d",
        out_shape,
        out,
        vec![input.clone(), weight.clone(), bias.clone()],
        Box::new(move |grad_out, needs| {
            let d_input = needs[0].then(|| grad_input(grad_out, wgt.data(), &dims));
            let d_weight = needs[1].then(|| grad_weight(grad_out, inp.data(), &dims));
            let d_bias = needs[2].then(|| grad_bias(grad_out, &dims));
            vec![d_input, d_weight, d_bias]
        }),
    )
}

/// Valid ranges so that `o + k - pad` stays inside `[0, limit)`.
#[inline]
fn span(k: usize, pad: usize, olen: usize, limit: usize) -> (usize, usize) {
    let lo = pad.saturating_sub(k);
    let hi = olen.min(limit + pad - k);
    (lo, hi.max(lo))
}

fn forward<T: Element>(x: &[T], wt: &[T], b: &[T], d: &ConvDims) -> Vec<T> {
    let (hw, ohw, khw) = (d.h * d.w, d.oh * d.ow, d.kh * d.kw);
    let mut out = vec![T::ZERO; d.n * d.cout * ohw];
    for ni in 0..d.n {
        for co in 0..d.cout {
            let oplane = &mut out[(ni * d.cout + co) * ohw..][..ohw];
            oplane.fill(b[co]);
            for ci in 0..d.cin {
                let iplane = &x[(ni * d.cin + ci) * hw..][..hw];
                let wbase = (co * d.cin + ci) * khw;
                for ky in 0..d.kh {
                    let (oy_lo, oy_hi) = span(ky, d.pad, d.oh, d.h);
                    for kx in 0..d.kw {
                        let wv = wt[wbase + ky * d.kw + kx];
                        let (ox_lo, ox_hi) = span(kx, d.pad, d.ow, d.w);
                        if ox_lo >= ox_hi {
                            continue;
                        }
                        for oy in oy_lo..oy_hi {
                            let iy = oy + ky - d.pad;
                            let irow = &iplane[iy * d.w + ox_lo + kx - d.pad..][..ox_hi - ox_lo];
                            let orow = &mut oplane[oy * d.ow + ox_lo..][..ox_hi - ox_lo];
                            for (o, i) in orow.iter_mut().zip(irow) {
                                *o += wv * *i;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn grad_input<T: Element>(g: &[T], wt: &[T], d: &ConvDims) -> Vec<T> {
    let (hw, ohw, khw) = (d.h * d.w, d.oh * d.ow, d.kh * d.kw);
    let mut dx = vec![T::ZERO; d.n * d.cin * hw];
    for ni in 0..d.n {
        for ci in 0..d.cin {
            let dplane = &mut dx[(ni * d.cin + ci) * hw..][..hw];
            for co in 0..d.cout {
                let gplane = &g[(ni * d.cout + co) * ohw..][..ohw];
                let wbase = (co * d.cin + ci) * khw;
                for ky in 0..d.kh {
                    let (oy_lo, oy_hi) = span(ky, d.pad, d.oh, d.h);
                    for kx in 0..d.kw {
                        let wv = wt[wbase + ky * d.kw + kx];
                        let (ox_lo, ox_hi) = span(kx, d.pad, d.ow, d.w);
                        if ox_lo >= ox_hi {
                            continue;
                        }
                        for oy in oy_lo..oy_hi {
                            let iy = oy + ky - d.pad;
                            let grow = &gplane[oy * d.ow + ox_lo..][..ox_hi - ox_lo];
                            let drow =
                                &mut dplane[iy * d.w + ox_lo + kx - d.pad..][..ox_hi - ox_lo];
                            for (dr, gr) in drow.iter_mut().zip(grow) {
                                *dr += wv * *gr;
                            }
                        }
                    }
                }
            }
        }
    }
    dx
}

fn grad_weight<T: Element>(g: &[T], x: &[T], d: &ConvDims) -> Vec<T> {
    let (hw, ohw, khw) = (d.h * d.w, d.oh * d.ow, d.kh * d.kw);
    let mut dw = vec![T::ZERO; d.cout * d.cin * khw];
    for co in 0..d.cout {
        for ci in 0..d.cin {
            let wbase = (co * d.cin + ci) * khw;
            for ky in 0..d.kh {
                let (oy_lo, oy_hi) = span(ky, d.pad, d.oh, d.h);
                for kx in 0..d.kw {
                    let (ox_lo, ox_hi) = span(kx, d.pad, d.ow, d.w);
                    if ox_lo >= ox_hi {
                        continue;
                    }
                    let mut acc = T::ZERO;
                    for ni in 0..d.n {
                        let gplane = &g[(ni * d.cout + co) * ohw..][..ohw];
                        let iplane = &x[(ni * d.cin + ci) * hw..][..hw];
                        for oy in oy_lo..oy_hi {
                            let iy = oy + ky - d.pad;
                            let grow = &gplane[oy * d.ow + ox_lo..][..ox_hi - ox_lo];
                            let irow = &iplane[iy * d.w + ox_lo + kx - d.pad..][..ox_hi - ox_lo];
                            for (gr, ir) in grow.iter().zip(irow) {
                                acc += *gr * *ir;
                            }
                        }
                    }
                    dw[wbase + ky * d.kw + kx] = acc;
                }
            }
        }
    }
    dw
}

fn grad_bias<T: Element>(g: &[T], d: &ConvDims) -> Vec<T> {
    let ohw = d.oh * d.ow;
    let mut db = vec![T::ZERO; d.cout];
    for ni in 0..d.n {
        for co in 0..d.cout {
            let gplane = &g[(ni * d.cout + co) * ohw..][..ohw];
            let mut acc = T::ZERO;
            for v in gplane {
                acc += *v;
            }
            db[co] += acc;
        }
    }
    db
}
