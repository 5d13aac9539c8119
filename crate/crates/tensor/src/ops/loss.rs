//! L1 loss.

use crate::element::Element;
use crate::error::Result;
use crate::ops::shape_err;
use crate::tensor::Tensor;

/// Mean absolute difference over all elements (batch, channels, and pixels
/// together, so the loss scale is independent of patch size).
///
/// The subgradient of `|x|` at 0 is taken as 0.
pub fn l1_loss<T: Element>(pred: &Tensor<T>, target: &Tensor<T>) -> Result<Tensor<T>> {
    if pred.shape() != target.shape() {
        return shape_err(
            "l1_loss",
            format!(
                "prediction shape {:?} != target shape {:?}",
                pred.shape(),
                target.shape()
            ),
        );
    }
    let numel = pred.numel();
    if numel == 0 {
        return shape_err("l1_loss", "empty tensors".to_string());
    }
    let mut acc = 0.0f64;
    for (&p, &t) in pred.data().iter().zip(target.data()) {
        acc += (p - t).abs_val().to_f64();
    }
    let mean = T::from_f64(acc / numel as f64);

    let (pc, tc) = (pred.clone(), target.clone());
    let inv_n = T::from_f64(1.0 / numel as f64);
    Tensor::from_op(
        "l1_loss",
        vec![],
        vec![mean],
        vec![pred.clone(), target.clone()],
        Box::new(move |grad_out, needs| {
            let g = grad_out[0];
            let signs = || -> Vec<T> {
                pc.data()
                    .iter()
                    .zip(tc.data())
                    .map(|(&p, &t)| {
                        if p > t {
                            g * inv_n
                        } else if p < t {
                            -(g * inv_n)
                        } else {
                            T::ZERO
                        }
                    })
                    .collect()
            };
            let dp = needs[0].then(&signs);
            let dt = needs[1].then(|| signs().iter().map(|&v| -v).collect());
            vec![dp, dt]
        }),
    )
}
