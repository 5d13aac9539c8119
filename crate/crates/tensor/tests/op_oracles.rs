//! Per-operator fixtures and finite-difference gradient checks.
//!
//! Gradient checks run in double precision: central differences with step
//! 1e-5 at points away from subgradient kinks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schn_tensor::gradcheck::{finite_difference, max_rel_err};
use schn_tensor::{
    add, concat_channels, conv2d, grid_sample_offsets, l1_loss, leaky_relu, pixel_shuffle,
    scale, slice_channels, Tensor,
};

const FD_STEP: f64 = 1e-5;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Scalarize `out` with a fixed two-level weight pattern built from two L1
/// losses against constant targets. The targets are chosen so `out` stays
/// strictly on one side of each in the finite-difference neighborhood,
/// making the composite exactly linear in `out` with per-element weights
/// (1 +- 0.3)/N. Nonuniform weights catch misrouted gradients that a plain
/// sum would cancel.
fn scalarize(out: &Tensor<f64>, base: &[f64], flips: &[bool]) -> Tensor<f64> {
    let lo: Vec<f64> = base.iter().map(|v| v - 10.0).collect();
    let hi: Vec<f64> = base
        .iter()
        .zip(flips)
        .map(|(v, &f)| if f { v + 10.0 } else { v - 10.0 })
        .collect();
    let t1 = Tensor::from_vec(lo, out.shape()).unwrap();
    let t2 = Tensor::from_vec(hi, out.shape()).unwrap();
    let l1 = l1_loss(out, &t1).unwrap();
    let l2 = scale(&l1_loss(out, &t2).unwrap(), 0.3).unwrap();
    add(&l1, &l2).unwrap()
}

fn flips(rng: &mut ChaCha8Rng, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.random_bool(0.5)).collect()
}

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

#[test]
fn conv2d_identity_kernel_passes_input_through() {
    let mut r = rng(1);
    let input = Tensor::from_vec(random_vec(&mut r, 5 * 5), &[1, 1, 5, 5]).unwrap();
    let mut w = vec![0.0; 9];
    w[4] = 1.0; // center tap
    let weight = Tensor::from_vec(w, &[1, 1, 3, 3]).unwrap();
    let bias = Tensor::<f64>::zeros(&[1]);
    let out = conv2d(&input, &weight, &bias, 1).unwrap();
    assert_eq!(out.data(), input.data());
}

#[test]
fn conv2d_ones_kernel_sums_neighborhood() {
    let c = 0.7f64;
    let input = Tensor::full(&[1, 1, 5, 5], c);
    let weight = Tensor::full(&[1, 1, 3, 3], 1.0);
    let bias = Tensor::<f64>::zeros(&[1]);
    let out = conv2d(&input, &weight, &bias, 1).unwrap();
    // interior pixel sums all nine taps
    let interior = out.data()[2 * 5 + 2];
    assert!((interior - 9.0 * c).abs() < 1e-12);
    // corner pixel only sees the four in-bounds taps
    assert!((out.data()[0] - 4.0 * c).abs() < 1e-12);
}

#[test]
fn conv2d_gradients_match_finite_differences() {
    let mut r = rng(2);
    let x0 = random_vec(&mut r, 2 * 5 * 5);
    let w0 = random_vec(&mut r, 4 * 2 * 3 * 3);
    let b0 = random_vec(&mut r, 4);
    let base_out = {
        let input = Tensor::from_vec(x0.clone(), &[1, 2, 5, 5]).unwrap();
        let weight = Tensor::from_vec(w0.clone(), &[4, 2, 3, 3]).unwrap();
        let bias = Tensor::from_vec(b0.clone(), &[4]).unwrap();
        conv2d(&input, &weight, &bias, 1).unwrap().data().to_vec()
    };
    let fl = flips(&mut r, base_out.len());

    let eval = |x: &[f64], w: &[f64], b: &[f64]| -> f64 {
        let input = Tensor::from_vec(x.to_vec(), &[1, 2, 5, 5]).unwrap();
        let weight = Tensor::from_vec(w.to_vec(), &[4, 2, 3, 3]).unwrap();
        let bias = Tensor::from_vec(b.to_vec(), &[4]).unwrap();
        let out = conv2d(&input, &weight, &bias, 1).unwrap();
        scalarize(&out, &base_out, &fl).item()
    };

    let input = Tensor::param(x0.clone(), &[1, 2, 5, 5]).unwrap();
    let weight = Tensor::param(w0.clone(), &[4, 2, 3, 3]).unwrap();
    let bias = Tensor::param(b0.clone(), &[4]).unwrap();
    let out = conv2d(&input, &weight, &bias, 1).unwrap();
    scalarize(&out, &base_out, &fl).backward().unwrap();

    let num_x = finite_difference(&|x: &[f64]| eval(x, &w0, &b0), &x0, FD_STEP);
    let num_w = finite_difference(&|w: &[f64]| eval(&x0, w, &b0), &w0, FD_STEP);
    let num_b = finite_difference(&|b: &[f64]| eval(&x0, &w0, b), &b0, FD_STEP);
    assert!(max_rel_err(&input.grad().unwrap(), &num_x) < 1e-6);
    assert!(max_rel_err(&weight.grad().unwrap(), &num_w) < 1e-6);
    assert!(max_rel_err(&bias.grad().unwrap(), &num_b) < 1e-6);
}

#[test]
fn conv2d_rejects_channel_mismatch() {
    let input = Tensor::<f64>::zeros(&[1, 2, 5, 5]);
    let weight = Tensor::<f64>::zeros(&[4, 3, 3, 3]);
    let bias = Tensor::<f64>::zeros(&[4]);
    assert!(conv2d(&input, &weight, &bias, 1).is_err());
}

// ---------------------------------------------------------------------------
// leaky_relu
// ---------------------------------------------------------------------------

#[test]
fn leaky_relu_fixture_values() {
    let x = Tensor::from_vec(vec![0.0, -2.0, 3.0], &[3]).unwrap();
    let y = leaky_relu(&x, 0.2).unwrap();
    assert_eq!(y.data(), &[0.0, -0.4, 3.0]);
}

#[test]
fn leaky_relu_gradient_at_negative_point_is_slope() {
    let x = Tensor::param(vec![-2.0], &[1]).unwrap();
    let y = leaky_relu(&x, 0.2).unwrap();
    let loss = l1_loss(&y, &Tensor::from_vec(vec![-10.0], &[1]).unwrap()).unwrap();
    loss.backward().unwrap();
    // d|y+10|/dx = sign(y+10) * 0.2 = 0.2
    let g = x.grad().unwrap()[0];
    let num = finite_difference(
        &|v: &[f64]| {
            let x = Tensor::from_vec(v.to_vec(), &[1]).unwrap();
            let y = leaky_relu(&x, 0.2).unwrap();
            l1_loss(&y, &Tensor::from_vec(vec![-10.0], &[1]).unwrap())
                .unwrap()
                .item()
        },
        &[-2.0],
        FD_STEP,
    );
    assert!((g - 0.2f64).abs() < 1e-12);
    assert!(max_rel_err(&[g], &num) < 1e-6);
}

#[test]
fn leaky_relu_gradients_match_finite_differences() {
    let mut r = rng(3);
    // keep samples away from the kink at 0
    let x0: Vec<f64> = (0..40)
        .map(|_| {
            let v: f64 = r.random_range(0.1..1.0);
            if r.random_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    let base_out: Vec<f64> = x0.iter().map(|&v| if v >= 0.0 { v } else { 0.2 * v }).collect();
    let fl = flips(&mut r, x0.len());
    let x = Tensor::param(x0.clone(), &[40]).unwrap();
    let y = leaky_relu(&x, 0.2).unwrap();
    scalarize(&y, &base_out, &fl).backward().unwrap();
    let num = finite_difference(
        &|v: &[f64]| {
            let x = Tensor::from_vec(v.to_vec(), &[40]).unwrap();
            let y = leaky_relu(&x, 0.2).unwrap();
            scalarize(&y, &base_out, &fl).item()
        },
        &x0,
        FD_STEP,
    );
    assert!(max_rel_err(&x.grad().unwrap(), &num) < 1e-6);
}

#[test]
fn leaky_relu_rejects_bad_slope() {
    let x = Tensor::<f64>::zeros(&[1]);
    assert!(leaky_relu(&x, 0.0).is_err());
    assert!(leaky_relu(&x, 1.5).is_err());
}

// ---------------------------------------------------------------------------
// pixel_shuffle
// ---------------------------------------------------------------------------

#[test]
fn pixel_shuffle_2x_fixture() {
    let x = Tensor::from_vec(vec![1.0, 2.0, 3.0, 4.0], &[1, 4, 1, 1]).unwrap();
    let y = pixel_shuffle(&x, 2).unwrap();
    assert_eq!(y.shape(), &[1, 1, 2, 2]);
    // rows (a,b),(c,d)
    assert_eq!(y.data(), &[1.0, 2.0, 3.0, 4.0]);
}

#[test]
fn pixel_shuffle_r1_is_identity() {
    let mut r = rng(4);
    let x0 = random_vec(&mut r, 2 * 3 * 4 * 5);
    let x = Tensor::from_vec(x0.clone(), &[2, 3, 4, 5]).unwrap();
    let y = pixel_shuffle(&x, 1).unwrap();
    assert_eq!(y.shape(), &[2, 3, 4, 5]);
    assert_eq!(y.data(), &x0[..]);
}

#[test]
fn pixel_shuffle_rejects_indivisible_channels() {
    let x = Tensor::<f64>::zeros(&[1, 6, 2, 2]);
    assert!(pixel_shuffle(&x, 2).is_err());
}

#[test]
fn pixel_shuffle_gradient_is_inverse_rearrangement() {
    let mut r = rng(5);
    let x0 = random_vec(&mut r, 8 * 3 * 3);
    let fl = flips(&mut r, x0.len());
    let base_shuffled = {
        let x = Tensor::from_vec(x0.clone(), &[1, 8, 3, 3]).unwrap();
        pixel_shuffle(&x, 2).unwrap().data().to_vec()
    };
    let x = Tensor::param(x0.clone(), &[1, 8, 3, 3]).unwrap();
    let y = pixel_shuffle(&x, 2).unwrap();
    scalarize(&y, &base_shuffled, &fl).backward().unwrap();
    let num = finite_difference(
        &|v: &[f64]| {
            let x = Tensor::from_vec(v.to_vec(), &[1, 8, 3, 3]).unwrap();
            let y = pixel_shuffle(&x, 2).unwrap();
            scalarize(&y, &base_shuffled, &fl).item()
        },
        &x0,
        FD_STEP,
    );
    assert!(max_rel_err(&x.grad().unwrap(), &num) < 1e-6);
}

// ---------------------------------------------------------------------------
// grid_sample_offsets
// ---------------------------------------------------------------------------

fn feat_2x2() -> Tensor<f64> {
    Tensor::from_vec(vec![0.0, 1.0, 2.0, 3.0], &[1, 1, 2, 2]).unwrap()
}

#[test]
fn grid_sample_zero_offsets_is_exact_identity() {
    let mut r = rng(6);
    let x0 = random_vec(&mut r, 3 * 7 * 5);
    let feat = Tensor::from_vec(x0.clone(), &[1, 3, 7, 5]).unwrap();
    let offsets = Tensor::<f64>::zeros(&[1, 2, 7, 5]);
    let out = grid_sample_offsets(&feat, &offsets).unwrap();
    assert_eq!(out.data(), &x0[..], "zero-offset warp must be bitwise identity");
}

#[test]
fn grid_sample_half_pixel_offset_interpolates() {
    // offset (+0.5, 0) at pixel (x=0,y=0): sample at x=0.5 between 0 and 1
    let mut off = vec![0.0; 8];
    off[0] = 0.5; // x-offset channel, pixel (0,0)
    let offsets = Tensor::from_vec(off, &[1, 2, 2, 2]).unwrap();
    let out = grid_sample_offsets(&feat_2x2(), &offsets).unwrap();
    assert!((out.data()[0] - 0.5).abs() < 1e-15);
    // untouched pixels stay identical
    assert_eq!(out.data()[1], 1.0);
    assert_eq!(out.data()[2], 2.0);
    assert_eq!(out.data()[3], 3.0);
}

#[test]
fn grid_sample_zero_border_contributes_zero() {
    // offset (+0.5, 0) at pixel (x=1,y=0): sample at x=1.5; the neighbor at
    // x=2 is outside and contributes 0, so the result is 0.5*1 + 0.5*0
    let mut off = vec![0.0; 8];
    off[1] = 0.5;
    let offsets = Tensor::from_vec(off, &[1, 2, 2, 2]).unwrap();
    let out = grid_sample_offsets(&feat_2x2(), &offsets).unwrap();
    assert!((out.data()[1] - 0.5).abs() < 1e-15);
}

#[test]
fn grid_sample_far_offset_reads_zero() {
    let mut off = vec![0.0; 8];
    off[0] = 100.0;
    let offsets = Tensor::from_vec(off, &[1, 2, 2, 2]).unwrap();
    let out = grid_sample_offsets(&feat_2x2(), &offsets).unwrap();
    assert_eq!(out.data()[0], 0.0);
}

/// Direct per-pixel evaluation of the bilinear sampling formula with the
/// zero-border rule; kept deliberately naive and separate from the operator.
fn brute_force_warp(
    feat: &[f64],
    off: &[f64],
    c: usize,
    h: usize,
    w: usize,
) -> Vec<f64> {
    let hw = h * w;
    let mut out = vec![0.0; c * hw];
    for ci in 0..c {
        for y1 in 0..h {
            for x1 in 0..w {
                let x = x1 as f64 + off[y1 * w + x1];
                let y = y1 as f64 + off[hw + y1 * w + x1];
                let (xt, yt) = (x.floor(), y.floor());
                let (fx, fy) = (x - xt, y - yt);
                let read = |xx: f64, yy: f64| -> f64 {
                    let (xx, yy) = (xx as i64, yy as i64);
                    if xx >= 0 && xx < w as i64 && yy >= 0 && yy < h as i64 {
                        feat[ci * hw + yy as usize * w + xx as usize]
                    } else {
                        0.0
                    }
                };
                out[ci * hw + y1 * w + x1] = (1.0 - fx) * (1.0 - fy) * read(xt, yt)
                    + fx * (1.0 - fy) * read(xt + 1.0, yt)
                    + (1.0 - fx) * fy * read(xt, yt + 1.0)
                    + fx * fy * read(xt + 1.0, yt + 1.0);
            }
        }
    }
    out
}

#[test]
fn grid_sample_matches_brute_force_on_random_inputs() {
    let mut r = rng(7);
    for trial in 0..5 {
        let (c, h, w) = (3, 16, 16);
        let x0 = random_vec(&mut r, c * h * w);
        let off0: Vec<f64> = (0..2 * h * w)
            .map(|_| r.random_range(-3.0..3.0))
            .collect();
        let feat = Tensor::from_vec(x0.clone(), &[1, c, h, w]).unwrap();
        let offsets = Tensor::from_vec(off0.clone(), &[1, 2, h, w]).unwrap();
        let out = grid_sample_offsets(&feat, &offsets).unwrap();
        let expect = brute_force_warp(&x0, &off0, c, h, w);
        let err = max_rel_err(out.data(), &expect);
        assert!(err < 1e-6, "trial {trial}: rel err {err}");
    }
}

#[test]
fn grid_sample_gradients_match_finite_differences() {
    let mut r = rng(8);
    let (c, h, w) = (2, 4, 4);
    let x0 = random_vec(&mut r, c * h * w);
    // fractional offsets away from integer kinks
    let off0: Vec<f64> = (0..2 * h * w)
        .map(|_| {
            let mag: f64 = r.random_range(0.2..0.8);
            let int: f64 = r.random_range(-2i64..2i64) as f64;
            int + mag
        })
        .collect();
    let base_out = {
        let feat = Tensor::from_vec(x0.clone(), &[1, c, h, w]).unwrap();
        let offsets = Tensor::from_vec(off0.clone(), &[1, 2, h, w]).unwrap();
        grid_sample_offsets(&feat, &offsets).unwrap().data().to_vec()
    };
    let fl = flips(&mut r, base_out.len());
    let eval = |x: &[f64], o: &[f64]| -> f64 {
        let feat = Tensor::from_vec(x.to_vec(), &[1, c, h, w]).unwrap();
        let offsets = Tensor::from_vec(o.to_vec(), &[1, 2, h, w]).unwrap();
        let out = grid_sample_offsets(&feat, &offsets).unwrap();
        scalarize(&out, &base_out, &fl).item()
    };

    let feat = Tensor::param(x0.clone(), &[1, c, h, w]).unwrap();
    let offsets = Tensor::param(off0.clone(), &[1, 2, h, w]).unwrap();
    let out = grid_sample_offsets(&feat, &offsets).unwrap();
    scalarize(&out, &base_out, &fl).backward().unwrap();

    let num_x = finite_difference(&|x: &[f64]| eval(x, &off0), &x0, FD_STEP);
    let num_o = finite_difference(&|o: &[f64]| eval(&x0, o), &off0, FD_STEP);
    assert!(max_rel_err(&feat.grad().unwrap(), &num_x) < 1e-6);
    assert!(max_rel_err(&offsets.grad().unwrap(), &num_o) < 1e-6);
}

// ---------------------------------------------------------------------------
// concat / slice
// ---------------------------------------------------------------------------

#[test]
fn concat_single_input_is_identity() {
    let mut r = rng(9);
    let x0 = random_vec(&mut r, 2 * 3 * 2 * 2);
    let x = Tensor::from_vec(x0.clone(), &[2, 3, 2, 2]).unwrap();
    let y = concat_channels(&[&x]).unwrap();
    assert_eq!(y.shape(), x.shape());
    assert_eq!(y.data(), &x0[..]);
}

#[test]
fn concat_three_64_channel_maps_gives_192() {
    let a = Tensor::<f64>::zeros(&[1, 64, 4, 4]);
    let b = Tensor::<f64>::zeros(&[1, 64, 4, 4]);
    let c = Tensor::<f64>::zeros(&[1, 64, 4, 4]);
    let y = concat_channels(&[&a, &b, &c]).unwrap();
    assert_eq!(y.shape(), &[1, 192, 4, 4]);
}

#[test]
fn concat_then_slice_recovers_inputs() {
    let mut r = rng(10);
    let a0 = random_vec(&mut r, 2 * 2 * 3 * 3);
    let b0 = random_vec(&mut r, 2 * 5 * 3 * 3);
    let a = Tensor::from_vec(a0.clone(), &[2, 2, 3, 3]).unwrap();
    let b = Tensor::from_vec(b0.clone(), &[2, 5, 3, 3]).unwrap();
    let y = concat_channels(&[&a, &b]).unwrap();
    assert_eq!(slice_channels(&y, 0, 2).unwrap().data(), &a0[..]);
    assert_eq!(slice_channels(&y, 2, 7).unwrap().data(), &b0[..]);
}

#[test]
fn concat_rejects_spatial_mismatch() {
    let a = Tensor::<f64>::zeros(&[1, 2, 3, 3]);
    let b = Tensor::<f64>::zeros(&[1, 2, 4, 3]);
    assert!(concat_channels(&[&a, &b]).is_err());
}

#[test]
fn concat_gradients_match_finite_differences() {
    let mut r = rng(11);
    let a0 = random_vec(&mut r, 2 * 2 * 2);
    let b0 = random_vec(&mut r, 3 * 2 * 2);
    let base_out: Vec<f64> = a0.iter().chain(&b0).copied().collect();
    let fl = flips(&mut r, base_out.len());
    let eval = |a: &[f64], b: &[f64]| -> f64 {
        let at = Tensor::from_vec(a.to_vec(), &[1, 2, 2, 2]).unwrap();
        let bt = Tensor::from_vec(b.to_vec(), &[1, 3, 2, 2]).unwrap();
        let y = concat_channels(&[&at, &bt]).unwrap();
        scalarize(&y, &base_out, &fl).item()
    };
    let at = Tensor::param(a0.clone(), &[1, 2, 2, 2]).unwrap();
    let bt = Tensor::param(b0.clone(), &[1, 3, 2, 2]).unwrap();
    let y = concat_channels(&[&at, &bt]).unwrap();
    scalarize(&y, &base_out, &fl).backward().unwrap();
    let num_a = finite_difference(&|a: &[f64]| eval(a, &b0), &a0, FD_STEP);
    let num_b = finite_difference(&|b: &[f64]| eval(&a0, b), &b0, FD_STEP);
    assert!(max_rel_err(&at.grad().unwrap(), &num_a) < 1e-6);
    assert!(max_rel_err(&bt.grad().unwrap(), &num_b) < 1e-6);
}

// ---------------------------------------------------------------------------
// l1_loss
// ---------------------------------------------------------------------------

#[test]
fn l1_loss_fixtures() {
    let mut r = rng(12);
    let a0 = random_vec(&mut r, 24);
    let a = Tensor::from_vec(a0.clone(), &[2, 3, 2, 2]).unwrap();
    assert_eq!(l1_loss(&a, &a).unwrap().item(), 0.0);

    let shifted: Vec<f64> = a0.iter().map(|v| v + 0.1).collect();
    let b = Tensor::from_vec(shifted, &[2, 3, 2, 2]).unwrap();
    assert!((l1_loss(&b, &a).unwrap().item() - 0.1).abs() < 1e-12);
}

#[test]
fn l1_loss_matches_brute_force_mean() {
    let mut r = rng(13);
    let a0 = random_vec(&mut r, 60);
    let b0 = random_vec(&mut r, 60);
    let expect: f64 = a0
        .iter()
        .zip(&b0)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 60.0;
    let a = Tensor::from_vec(a0, &[3, 4, 5]).unwrap();
    let b = Tensor::from_vec(b0, &[3, 4, 5]).unwrap();
    assert!((l1_loss(&a, &b).unwrap().item() - expect).abs() < 1e-12);
}

#[test]
fn l1_loss_gradient_matches_finite_differences() {
    let mut r = rng(14);
    let a0 = random_vec(&mut r, 30);
    // keep |a - b| bounded away from the kink
    let b0: Vec<f64> = a0
        .iter()
        .map(|v| if r.random_bool(0.5) { v + 0.5 } else { v - 0.5 })
        .collect();
    let a = Tensor::param(a0.clone(), &[30]).unwrap();
    let b = Tensor::from_vec(b0.clone(), &[30]).unwrap();
    l1_loss(&a, &b).unwrap().backward().unwrap();
    let num = finite_difference(
        &|v: &[f64]| {
            let a = Tensor::from_vec(v.to_vec(), &[30]).unwrap();
            let b = Tensor::from_vec(b0.clone(), &[30]).unwrap();
            l1_loss(&a, &b).unwrap().item()
        },
        &a0,
        FD_STEP,
    );
    assert!(max_rel_err(&a.grad().unwrap(), &num) < 1e-6);
}

#[test]
fn l1_loss_rejects_shape_mismatch() {
    let a = Tensor::<f64>::zeros(&[2, 3]);
    let b = Tensor::<f64>::zeros(&[3, 2]);
    assert!(l1_loss(&a, &b).is_err());
}

// ---------------------------------------------------------------------------
// backward mechanics
// ---------------------------------------------------------------------------

#[test]
fn backward_at_minimum_gives_zero_gradients() {
    let mut r = rng(15);
    let x0 = random_vec(&mut r, 16);
    let x = Tensor::param(x0.clone(), &[16]).unwrap();
    let target = x.detach();
    let loss = l1_loss(&x, &target).unwrap();
    assert_eq!(loss.item(), 0.0);
    loss.backward().unwrap();
    assert!(x.grad().unwrap().iter().all(|&g| g == 0.0));
}

#[test]
fn backward_on_composite_graph_matches_finite_differences() {
    let mut r = rng(16);
    let x0 = random_vec(&mut r, 2 * 4 * 4);
    let w0 = random_vec(&mut r, 3 * 2 * 3 * 3);
    let b0 = random_vec(&mut r, 3);
    let t0: Vec<f64> = (0..3 * 4 * 4).map(|_| r.random_range(2.0..3.0)).collect();

    let eval = |x: &[f64], w: &[f64], b: &[f64]| -> f64 {
        let input = Tensor::from_vec(x.to_vec(), &[1, 2, 4, 4]).unwrap();
        let weight = Tensor::from_vec(w.to_vec(), &[3, 2, 3, 3]).unwrap();
        let bias = Tensor::from_vec(b.to_vec(), &[3]).unwrap();
        let target = Tensor::from_vec(t0.clone(), &[1, 3, 4, 4]).unwrap();
        let h = conv2d(&input, &weight, &bias, 1).unwrap();
        let h = leaky_relu(&h, 0.2).unwrap();
        l1_loss(&h, &target).unwrap().item()
    };

    let input = Tensor::param(x0.clone(), &[1, 2, 4, 4]).unwrap();
    let weight = Tensor::param(w0.clone(), &[3, 2, 3, 3]).unwrap();
    let bias = Tensor::param(b0.clone(), &[3]).unwrap();
    let target = Tensor::from_vec(t0.clone(), &[1, 3, 4, 4]).unwrap();
    let h = conv2d(&input, &weight, &bias, 1).unwrap();
    let h = leaky_relu(&h, 0.2).unwrap();
    l1_loss(&h, &target).unwrap().backward().unwrap();

    let num_x = finite_difference(&|x: &[f64]| eval(x, &w0, &b0), &x0, FD_STEP);
    let num_w = finite_difference(&|w: &[f64]| eval(&x0, w, &b0), &w0, FD_STEP);
    let num_b = finite_difference(&|b: &[f64]| eval(&x0, &w0, b), &b0, FD_STEP);
    assert!(max_rel_err(&input.grad().unwrap(), &num_x) < 1e-6);
    assert!(max_rel_err(&weight.grad().unwrap(), &num_w) < 1e-6);
    assert!(max_rel_err(&bias.grad().unwrap(), &num_b) < 1e-6);
}

#[test]
fn backward_twice_accumulates_gradients() {
    let mut r = rng(17);
    let x0 = random_vec(&mut r, 8);
    let t0: Vec<f64> = x0.iter().map(|v| v + 1.0).collect();
    let x = Tensor::param(x0, &[8]).unwrap();
    let t = Tensor::from_vec(t0, &[8]).unwrap();
    let loss = l1_loss(&x, &t).unwrap();
    loss.backward().unwrap();
    let once = x.grad().unwrap();
    loss.backward().unwrap();
    let twice = x.grad().unwrap();
    for (a, b) in once.iter().zip(&twice) {
        assert_eq!(2.0 * a, *b);
    }
}

#[test]
fn backward_rejects_non_scalar() {
    let x = Tensor::param(vec![1.0, 2.0], &[2]).unwrap();
    let y = scale(&x, 2.0).unwrap();
    assert!(y.backward().is_err());
}

#[test]
fn unused_parameter_has_zero_gradient() {
    let x = Tensor::param(vec![1.0], &[1]).unwrap();
    let unused = Tensor::param(vec![5.0], &[1]).unwrap();
    let t = Tensor::from_vec(vec![3.0], &[1]).unwrap();
    l1_loss(&x, &t).unwrap().backward().unwrap();
    assert!(unused.grad().is_none());
    assert_eq!(unused.grad_or_zeros(), vec![0.0]);
}

#[test]
fn non_finite_forward_is_an_error() {
    let x = Tensor::from_vec(vec![1e308], &[1]).unwrap();
    // 1e308 * 10 overflows to Inf
    assert!(scale(&x, 10.0).is_err());
}
