//! Hallucination-map rendering with the optical-flow color convention:
//! hue encodes offset direction, saturation encodes magnitude (normalized by
//! the per-map maximum), value stays at 1. A zero map renders uniform white.

use schn_degradation::ImageBuffer;
use schn_tensor::Tensor;

use crate::error::{NetworkError, Result};

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f32; 3] {
    // h in [0, 1), s and v in [0, 1]
    let h6 = (h - h.floor()) * 6.0;
    let i = h6.floor() as i32 % 6;
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r as f32, g as f32, b as f32]
}

/// Render one batch element of an `[N,2,H,W]` offset field. `gain`
/// multiplies the magnitudes before saturating against the per-map maximum,
/// so larger gains saturate colors without changing hue.
pub fn visualize_hallucination_map(
    map: &Tensor<f32>,
    index: usize,
    gain: f64,
) -> Result<ImageBuffer> {
    let [n, c, h, w] = match map.shape() {
        [n, c, h, w] => [*n, *c, *h, *w],
        other => {
            return Err(NetworkError::Config(format!(
                "expected 4-D offset tensor, got {other:?}"
            )))
        }
    };
    if c != 2 || index >= n {
        return Err(NetworkError::Config(format!(
            "cannot render map {index} from shape {:?}",
            map.shape()
        )));
    }
    let hw = h * w;
    let off_x = &map.data()[index * 2 * hw..][..hw];
    let off_y = &map.data()[(index * 2 + 1) * hw..][..hw];

    let max_mag = off_x
        .iter()
        .zip(off_y)
        .map(|(&x, &y)| (x as f64).hypot(y as f64))
        .fold(0.0f64, f64::max);

    let mut img = ImageBuffer::new(h, w);
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (off_x[y * w + x] as f64, off_y[y * w + x] as f64);
            let rgb = if max_mag == 0.0 {
                [1.0, 1.0, 1.0]
            } else {
                let mag = dx.hypot(dy);
                let sat = (gain * mag / max_mag).clamp(0.0, 1.0);
                let hue = dy.atan2(dx).rem_euclid(std::f64::consts::TAU)
                    / std::f64::consts::TAU;
                hsv_to_rgb(hue, sat, 1.0)
            };
            for (ch, v) in rgb.iter().enumerate() {
                img.set(y, x, ch, *v);
            }
        }
    }
    Ok(img)
}
