//! SSIM with the original parameterization: 11x11 Gaussian window with
//! sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0, biased weighted
//! covariances, computed per channel over valid window positions and
//! averaged over RGB.

use schn_degradation::ImageBuffer;

use crate::error::{MetricsError, Result};

const WIN: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

fn gaussian_1d() -> [f64; WIN] {
    let mut w = [0.0; WIN];
    let c = (WIN / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-0.5 * (d / SIGMA) * (d / SIGMA)).exp();
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Separable valid-window filtering: horizontal then vertical 11-tap pass.
/// The normalized 2-D Gaussian window is exactly the outer product of the
/// normalized 1-D one.
fn filter_valid(src: &[f64], h: usize, w: usize, taps: &[f64; WIN]) -> Vec<f64> {
    let ow = w - WIN + 1;
    let mut horiz = vec![0.0; h * ow];
    for y in 0..h {
        let row = &src[y * w..][..w];
        let orow = &mut horiz[y * ow..][..ow];
        for x in 0..ow {
            let mut acc = 0.0;
            for (t, &tv) in taps.iter().enumerate() {
                acc += tv * row[x + t];
            }
            orow[x] = acc;
        }
    }
    let oh = h - WIN + 1;
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (t, &tv) in taps.iter().enumerate() {
                acc += tv * horiz[(y + t) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], h: usize, w: usize, taps: &[f64; WIN]) -> f64 {
    let a2: Vec<f64> = a.iter().map(|v| v * v).collect();
    let b2: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(a, h, w, taps);
    let mu_b = filter_valid(b, h, w, taps);
    let m_aa = filter_valid(&a2, h, w, taps);
    let m_bb = filter_valid(&b2, h, w, taps);
    let m_ab = filter_valid(&ab, h, w, taps);

    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let mut acc = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = m_aa[i] - ma * ma;
        let vb = m_bb[i] - mb * mb;
        let cov = m_ab[i] - ma * mb;
        let s = ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        acc += s;
    }
    acc / mu_a.len() as f64
}

/// Mean SSIM over the RGB channels. Requires images at least 11x11.
pub fn ssim_rgb(pred: &ImageBuffer, reference: &ImageBuffer) -> Result<f64> {
    if pred.height() != reference.height() || pred.width() != reference.width() {
        return Err(MetricsError::Shape(format!(
            "{}x{} vs {}x{}",
            pred.height(),
            pred.width(),
            reference.height(),
            reference.width()
        )));
    }
    let (h, w) = (pred.height(), pred.width());
    if h < WIN || w < WIN {
        return Err(MetricsError::Config(format!(
            "SSIM needs at least {WIN}x{WIN} pixels, got {h}x{w}"
        )));
    }
    let taps = gaussian_1d();
    let mut total = 0.0;
    for c in 0..ImageBuffer::CHANNELS {
        let a: Vec<f64> = (0..h * w)
            .map(|i| pred.data()[i * ImageBuffer::CHANNELS + c] as f64)
            .collect();
        let b: Vec<f64> = (0..h * w)
            .map(|i| reference.data()[i * ImageBuffer::CHANNELS + c] as f64)
            .collect();
        total += ssim_plane(&a, &b, h, w, &taps);
    }
    Ok(total / ImageBuffer::CHANNELS as f64)
}
