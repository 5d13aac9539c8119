//! Central finite-difference utilities for gradient verification.
//!
//! These run the forward path only, so they stay independent of the
//! backward implementation they are used to check. Intended for tests; only
//! meaningful in double precision.

/// Central finite-difference gradient of `f` at `x0`, one coordinate at a
/// time.
pub fn finite_difference<F>(f: &F, x0: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut grad = vec![0.0; x0.len()];
    let mut x = x0.to_vec();
    for i in 0..x0.len() {
        x[i] = x0[i] + step;
        let fp = f(&x);
        x[i] = x0[i] - step;
        let fm = f(&x);
        x[i] = x0[i];
        grad[i] = (fp - fm) / (2.0 * step);
    }
    grad
}

/// Mixed relative/absolute comparison: every element must satisfy
/// `|a - n| <= rtol * max(|a|, |n|)` or `|a - n| <= atol`. The absolute
/// escape exists because a central difference of a loss `f` with step `h`
/// carries roundoff noise of order `eps * |f| / h`, so gradients below
/// `atol / rtol` cannot be certified relatively by any finite-difference
/// probe. Returns the worst offender, or `None` when everything passes.
pub fn check_close(analytic: &[f64], numeric: &[f64], rtol: f64, atol: f64) -> Option<String> {
    assert_eq!(analytic.len(), numeric.len());
    let mut worst: Option<(usize, f64)> = None;
    for (i, (&a, &n)) in analytic.iter().zip(numeric).enumerate() {
        let diff = (a - n).abs();
        if diff <= rtol * a.abs().max(n.abs()) || diff <= atol {
            continue;
        }
        let score = diff / a.abs().max(n.abs()).max(atol);
        if worst.map_or(true, |(_, s)| score > s) {
            worst = Some((i, score));
        }
    }
    worst.map(|(i, _)| {
        format!(
            "element {i}: analytic {} vs numeric {} (diff {})",
            analytic[i],
            numeric[i],
            (analytic[i] - numeric[i]).abs()
        )
    })
}

/// Largest relative discrepancy between analytic and numeric gradients.
/// Entries where both magnitudes fall below `1e-10` compare by absolute
/// difference instead (a relative error is meaningless at zero).
pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let mut worst: f64 = 0.0;
    for (&a, &n) in analytic.iter().zip(numeric) {
        let denom = a.abs().max(n.abs());
        let err = if denom < 1e-10 {
            (a - n).abs()
        } else {
            (a - n).abs() / denom
        };
        worst = worst.max(err);
    }
    worst
}
