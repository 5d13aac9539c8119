//! Channel-dimension concatenation and slicing.

use crate::element::Element;
use crate::error::Result;
use crate::ops::{dims4, shape_err};
use crate::tensor::Tensor;

/// Concatenate along the channel dimension in argument order. All inputs
/// must agree on batch and spatial dimensions. The gradient is the split.
pub fn concat_channels<T: Element>(xs: &[&Tensor<T>]) -> Result<Tensor<T>> {
    if xs.is_empty() {
        return shape_err("concat_channels", "empty input list".to_string());
    }
    let [n, _, h, w] = dims4(xs[0], "concat_channels")?;
    let mut channels = Vec::with_capacity(xs.len());
    for x in xs {
        let [xn, xc, xh, xw] = dims4(x, "concat_channels")?;
        if xn != n || xh != h || xw != w {
            return shape_err(
                "concat_channels",
                format!(
                    "input shape {:?} does not match leading input {:?}",
                    x.shape(),
                    xs[0].shape()
                ),
            );
        }
        channels.push(xc);
    }
    let c_total: usize = channels.iter().sum();
    let hw = h * w;
    let mut out = vec![T::ZERO; n * c_total * hw];
    for ni in 0..n {
        let mut c_base = 0;
        for (x, &xc) in xs.iter().zip(&channels) {
            let src = &x.data()[ni * xc * hw..][..xc * hw];
            out[(ni * c_total + c_base) * hw..][..xc * hw].copy_from_slice(src);
            c_base += xc;
        }
    }
    let parents: Vec<Tensor<T>> = xs.iter().map(|x| (*x).clone()).collect();
    Tensor::from_op(
        "concat_channels",
        vec![n, c_total, h, w],
        out,
        parents,
        Box::new(move |grad_out, needs| {
            let mut grads = Vec::with_capacity(channels.len());
            let mut c_base = 0;
            for (i, &xc) in channels.iter().enumerate() {
                let g = needs[i].then(|| {
                    let mut buf = vec![T::ZERO; n * xc * hw];
                    for ni in 0..n {
                        let src = &grad_out[(ni * c_total + c_base) * hw..][..xc * hw];
                        buf[ni * xc * hw..][..xc * hw].copy_from_slice(src);
                    }
                    buf
                });
                grads.push(g);
                c_base += xc;
            }
            grads
        }),
    )
}

/// Channels `[start, end)` of a 4-D tensor. The gradient scatters back into
/// the sliced range.
pub fn slice_channels<T: Element>(
    x: &Tensor<T>,
    start: usize,
    end: usize,
) -> Result<Tensor<T>> {
    let [n, c, h, w] = dims4(x, "slice_channels")?;
    if start >= end || end > c {
        return shape_err(
            "slice_channels",
            format!("range {start}..{end} invalid for {c} channels"),
        );
    }
    let hw = h * w;
    let sc = end - start;
    let mut out = vec![T::ZERO; n * sc * hw];
    for ni in 0..n {
        let src = &x.data()[(ni * c + start) * hw..][..sc * hw];
        out[ni * sc * hw..][..sc * hw].copy_from_slice(src);
    }
    Tensor::from_op(
        "slice_channels",
        vec![n, sc, h, w],
        out,
        vec![x.clone()],
        Box::new(move |grad_out, needs| {
            let dx = needs[0].then(|| {
                let mut buf = vec![T::ZERO; n * c * hw];
                for ni in 0..n {
                    buf[(ni * c + start) * hw..][..sc * hw]
                        .copy_from_slice(&grad_out[ni * sc * hw..][..sc * hw]);
                }
                buf
            });
            vec![dx]
        }),
    )
}
