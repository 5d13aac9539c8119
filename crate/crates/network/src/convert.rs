//! ImageBuffer (HWC) <-> Tensor (NCHW) conversions.

use schn_degradation::ImageBuffer;
use schn_tensor::Tensor;

use crate::error::{NetworkError, Result};

/// Stack same-sized RGB images into an `[N,3,H,W]` tensor.
pub fn images_to_tensor(images: &[&ImageBuffer]) -> Result<Tensor<f32>> {
    let Some(first) = images.first() else {
        return Err(NetworkError::Config("empty image batch".into()));
    };
    let (h, w) = (first.height(), first.width());
    let mut data = Vec::with_capacity(images.len() * 3 * h * w);
    for img in images {
        if img.height() != h || img.width() != w {
            return Err(NetworkError::Config(format!(
                "batch images disagree in size: {}x{} vs {h}x{w}",
                img.height(),
                img.width()
            )));
        }
        for c in 0..3 {
            for y in 0..h {
                for x in 0..w {
                    data.push(img.get(y, x, c));
                }
            }
        }
    }
    Ok(Tensor::from_vec(data, &[images.len(), 3, h, w])?)
}

/// Extract batch element `index` of an `[N,3,H,W]` tensor as an image.
/// Values are copied as-is; clamping happens at file boundaries only.
pub fn tensor_to_image(t: &Tensor<f32>, index: usize) -> Result<ImageBuffer> {
    let [n, c, h, w] = match t.shape() {
        [n, c, h, w] => [*n, *c, *h, *w],
        other => {
            return Err(NetworkError::Config(format!(
                "expected 4-D tensor, got {other:?}"
            )))
        }
    };
    if c != 3 || index >= n {
        return Err(NetworkError::Config(format!(
            "cannot extract image {index} from shape {:?}",
            t.shape()
        )));
    }
    let mut img = ImageBuffer::new(h, w);
    let data = t.data();
    for ch in 0..3 {
        let plane = &data[(index * 3 + ch) * h * w..][..h * w];
        for y in 0..h {
            for x in 0..w {
                img.set(y, x, ch, plane[y * w + x]);
            }
        }
    }
    Ok(img)
}
