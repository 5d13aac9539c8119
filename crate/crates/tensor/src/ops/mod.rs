pub mod concat;
pub mod conv;
pub mod elementwise;
pub mod loss;
pub mod sample;
pub mod shuffle;

use crate::element::Element;
use crate::error::{Result, TensorError};
use crate::tensor::Tensor;

/// Shape `[n, c, h, w]` of a 4-D tensor, or a shape-mismatch error.
pub(crate) fn dims4<T: Element>(t: &Tensor<T>, op: &'static str) -> Result<[usize; 4]> {
    match t.shape() {
        [n, c, h, w] => Ok([*n, *c, *h, *w]),
        other => Err(TensorError::ShapeMismatch {
            op,
            details: format!("expected 4-D [n,c,h,w] tensor, got {other:?}"),
        }),
    }
}

pub(crate) fn shape_err<T>(op: &'static str, details: String) -> Result<T> {
    Err(TensorError::ShapeMismatch { op, details })
}
