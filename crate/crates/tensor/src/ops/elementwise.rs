//! Elementwise operators: leaky ReLU, addition, scaling by a constant.

use crate::element::Element;
use crate::error::{Result, TensorError};
use crate::ops::shape_err;
use crate::tensor::Tensor;

/// `max(x, slope*x)` elementwise. The subgradient at 0 is 1 (the positive
/// branch), so the operator is deterministic everywhere.
pub fn leaky_relu<T: Element>(x: &Tensor<T>, slope: f64) -> Result<Tensor<T>> {
    if !(0.0..1.0).contains(&slope) || slope == 0.0 {
        return Err(TensorError::InvalidConfig(format!(
            "leaky_relu slope must be in (0,1), got {slope}"
        )));
    }
    let s = T::from_f64(slope);
    let out: Vec<T> = x
        .data()
        .iter()
        .map(|&v| if v >= T::ZERO { v } else { s * v })
        .collect();
    let xc = x.clone();
    Tensor::from_op(
        "leaky_relu",
        x.shape().to_vec(),
        out,
        vec![x.clone()],
        Box::new(move |grad_out, needs| {
            let dx = needs[0].then(|| {
                xc.data()
                    .iter()
                    .zip(grad_out)
                    .map(|(&v, &g)| if v >= T::ZERO { g } else { s * g })
                    .collect()
            });
            vec![dx]
        }),
    )
}

/// Elementwise sum of two same-shape tensors.
pub fn add<T: Element>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.shape() != b.shape() {
        return shape_err(
            "add",
            format!("shapes {:?} and {:?} differ", a.shape(), b.shape()),
        );
    }
    let out: Vec<T> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| x + y)
        .collect();
    Tensor::from_op(
        "add",
        a.shape().to_vec(),
        out,
        vec![a.clone(), b.clone()],
        Box::new(move |grad_out, needs| {
            let da = needs[0].then(|| grad_out.to_vec());
            let db = needs[1].then(|| grad_out.to_vec());
            vec![da, db]
        }),
    )
}

/// Multiply every element by a constant.
pub fn scale<T: Element>(x: &Tensor<T>, factor: f64) -> Result<Tensor<T>> {
    let f = T::from_f64(factor);
    let out: Vec<T> = x.data().iter().map(|&v| f * v).collect();
    Tensor::from_op(
        "scale",
        x.shape().to_vec(),
        out,
        vec![x.clone()],
        Box::new(move |grad_out, needs| {
            let dx = needs[0].then(|| grad_out.iter().map(|&g| f * g).collect());
            vec![dx]
        }),
    )
}
