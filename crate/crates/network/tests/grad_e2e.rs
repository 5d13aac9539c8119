//! End-to-end gradient check: every parameter of a one-module model at
//! 8x8 input, double precision, against central finite differences. This
//! specifically exercises gradients flowing through the bilinear warp into
//! the offset branches.

use schn_network::{ForwardMode, SchConfig, SchnModel};
use schn_tensor::gradcheck::{check_close, finite_difference};
use schn_tensor::{l1_loss, Tensor};

fn build_model() -> SchnModel<f64> {
    let cfg = SchConfig {
        channels: 8,
        n_modules: 1,
        n_maps: 2,
        scale_factor: 2,
        leaky_slope: 0.2,
    };
    let mut model = SchnModel::<f64>::init_random(cfg, 41).unwrap();
    // Move the offset convolutions off their zero init: at exactly zero
    // offset the bilinear warp sits on an interpolation kink where finite
    // differences are one-sided. A bias of ~0.3 puts every sample point at a
    // generic fractional position.
    for (name, t) in model.named_params_mut() {
        if name.contains("conv2") {
            let data: Vec<f64> = (0..t.numel())
                .map(|i| 0.3 + 0.02 * ((i as f64) * 0.7).sin())
                .collect();
            *t = Tensor::param(data, &t.shape().to_vec()).unwrap();
        }
    }
    model
}

fn loss_of(model: &SchnModel<f64>, lr: &Tensor<f64>, target: &Tensor<f64>) -> f64 {
    let out = model.forward(lr, ForwardMode::AllHeads).unwrap();
    l1_loss(out.final_output(), target).unwrap().item()
}

#[test]
fn every_parameter_gradient_matches_finite_differences() {
    let mut model = build_model();
    let lr = Tensor::from_vec(
        (0..3 * 64)
            .map(|i| (i as f64 * 0.131).sin() * 0.4 + 0.5)
            .collect(),
        &[1, 3, 8, 8],
    )
    .unwrap();
    // constant target far above the output range keeps |pred - target| away
    // from the L1 kink for every finite-difference probe
    let target = Tensor::<f64>::full(&[1, 3, 16, 16], 2.0);

    let out = model.forward(&lr, ForwardMode::AllHeads).unwrap();
    let loss = l1_loss(out.final_output(), &target).unwrap();
    loss.backward().unwrap();

    let names: Vec<String> = model.named_params().iter().map(|(n, _)| n.clone()).collect();
    for name in names {
        let (x0, analytic, shape) = {
            let params = model.named_params();
            let (_, t) = params.iter().find(|(n, _)| *n == name).unwrap();
            (t.data().to_vec(), t.grad_or_zeros(), t.shape().to_vec())
        };
        let numeric = finite_difference(
            &|x: &[f64]| {
                let mut probe = build_model_like(&model);
                for (n, t) in probe.named_params_mut() {
                    if n == name {
                        *t = Tensor::param(x.to_vec(), &shape).unwrap();
                    }
                }
                loss_of(&probe, &lr, &target)
            },
            &x0,
            1e-5,
        );
        // rtol 1e-5; atol covers the finite-difference roundoff floor
        // (eps * |loss| / step ~ 2e-11) for near-cancelled gradients
        if let Some(msg) = check_close(&analytic, &numeric, 1e-5, 1e-9) {
            panic!("{name}: {msg}");
        }
    }
}

/// Clone a model's parameter values into a fresh instance (the probe the
/// finite-difference loop mutates).
fn build_model_like(model: &SchnModel<f64>) -> SchnModel<f64> {
    let mut out = SchnModel::<f64>::init_zeros(model.config).unwrap();
    let source = model.named_params();
    for (name, slot) in out.named_params_mut() {
        let (_, t) = source.iter().find(|(n, _)| *n == name).unwrap();
        *slot = Tensor::param(t.data().to_vec(), &t.shape().to_vec()).unwrap();
    }
    out
}
