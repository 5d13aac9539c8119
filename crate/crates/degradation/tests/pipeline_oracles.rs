//! Degradation pipeline determinism, branch semantics, and noise statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schn_degradation::{
    add_gaussian_noise, augment, bicubic_resize, degrade, synthesize_corpus, DegradationSpec,
    ImageBuffer, Scale, DIHEDRAL_COUNT,
};

fn hr_image(h: usize, w: usize, seed: f32) -> ImageBuffer {
    let mut img = ImageBuffer::new(h, w);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let v = ((y * 37 + x * 11 + c * 3) as f32 * (0.013 + seed)).sin() * 0.4 + 0.5;
                img.set(y, x, c, v);
            }
        }
    }
    img
}

fn spec(scale: u32, blur_p: f64, noise_p: f64, seed: u64) -> DegradationSpec {
    let mut s = DegradationSpec::default_for_scale(scale, seed).unwrap();
    s.blur_probability = blur_p;
    s.noise_probability = noise_p;
    s
}

#[test]
fn both_branches_skipped_is_plain_bicubic() {
    let hr = hr_image(32, 32, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let out = degrade(&hr, &spec(2, 0.0, 0.0, 5), &mut rng).unwrap();
    let plain = bicubic_resize(&hr, Scale::down(2), true).unwrap();
    assert_eq!(out.lr_clean.data(), plain.data());
    assert_eq!(out.lr_noisy.data(), out.lr_clean.data());
    assert!(out.provenance.blur.is_none() && out.provenance.noise.is_none());
}

#[test]
fn noise_free_regime_keeps_x_equal_to_y() {
    // blur always on, noise always off: the network input would be the
    // noise-free LR image
    let hr = hr_image(32, 32, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let out = degrade(&hr, &spec(2, 1.0, 0.0, 6), &mut rng).unwrap();
    assert!(out.provenance.blur.is_some());
    assert_eq!(out.lr_noisy.data(), out.lr_clean.data());
    // and the blur actually changed the clean LR image
    let plain = bicubic_resize(&hr, Scale::down(2), true).unwrap();
    assert_ne!(out.lr_clean.data(), plain.data());
}

#[test]
fn noise_branch_changes_x() {
    let hr = hr_image(32, 32, 0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let out = degrade(&hr, &spec(2, 0.0, 1.0, 7), &mut rng).unwrap();
    assert!(out.provenance.noise.is_some());
    assert_ne!(out.lr_noisy.data(), out.lr_clean.data());
}

#[test]
fn fixed_seed_replays_bit_identically() {
    let hr = hr_image(32, 32, 0.3);
    let s = spec(4, 0.7, 0.7, 8);
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        degrade(&hr, &s, &mut rng).unwrap()
    };
    let (a, b) = (run(99), run(99));
    assert_eq!(a.lr_clean.data(), b.lr_clean.data());
    assert_eq!(a.lr_noisy.data(), b.lr_noisy.data());
    assert_eq!(a.provenance, b.provenance);
}

#[test]
fn indivisible_dimensions_are_rejected() {
    let hr = hr_image(30, 32, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(degrade(&hr, &spec(4, 0.0, 0.0, 1), &mut rng).is_err());
}

#[test]
fn spec_validation_catches_bad_ranges() {
    let mut s = spec(2, 0.5, 0.5, 1);
    s.sigma_range = (0.5, 3.5); // above the x2 bound
    assert!(s.validate().is_err());
    let mut s = spec(4, 0.5, 0.5, 1);
    s.noise_level_range = (0.0, 60.0);
    assert!(s.validate().is_err());
    let mut s = spec(4, 0.5, 0.5, 1);
    s.blur_probability = 1.2;
    assert!(s.validate().is_err());
    let mut s = spec(4, 0.5, 0.5, 1);
    s.scale_factor = 3;
    assert!(s.validate().is_err());
}

#[test]
fn noise_standard_deviation_matches_the_level() {
    // constant image, level 15: the sample std of (out - in) over >= 1e5
    // values must be within 5% of 15/255
    let mut img = ImageBuffer::new(200, 200);
    img.data_mut().fill(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let noisy = add_gaussian_noise(&img, 15.0, &mut rng);
    let n = noisy.data().len() as f64;
    assert!(n >= 1e5);
    let mean: f64 = noisy
        .data()
        .iter()
        .zip(img.data())
        .map(|(a, b)| (a - b) as f64)
        .sum::<f64>()
        / n;
    let var: f64 = noisy
        .data()
        .iter()
        .zip(img.data())
        .map(|(a, b)| {
            let d = (a - b) as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1.0);
    let std = var.sqrt();
    let expect = 15.0 / 255.0;
    assert!(
        (std - expect).abs() < 0.05 * expect,
        "std {std} vs {expect}"
    );
}

#[test]
fn same_seed_gives_identical_noise_field() {
    let img = hr_image(16, 16, 0.4);
    let a = add_gaussian_noise(&img, 30.0, &mut ChaCha8Rng::seed_from_u64(3));
    let b = add_gaussian_noise(&img, 30.0, &mut ChaCha8Rng::seed_from_u64(3));
    assert_eq!(a.data(), b.data());
}

#[test]
fn augmentation_draws_are_uniform() {
    let patch = hr_image(8, 8, 0.5);
    let mut counts = [0usize; DIHEDRAL_COUNT as usize];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..8000 {
        let (_, id) = augment(&patch, &mut rng).unwrap();
        counts[id as usize] += 1;
    }
    for (id, &c) in counts.iter().enumerate() {
        assert!(
            (900..=1100).contains(&c),
            "transform {id} drawn {c} times out of 8000"
        );
    }
}

#[test]
fn corpus_replay_is_bit_exact() {
    let images = vec![
        ("a".to_string(), hr_image(48, 40, 0.6)),
        ("b".to_string(), hr_image(40, 64, 0.7)),
        ("tiny".to_string(), hr_image(16, 16, 0.8)), // skipped: undersized
    ];
    let s = spec(2, 0.8, 0.8, 42);
    let (manifest, patches) = synthesize_corpus(&images, &s, 32, 24).unwrap();
    assert_eq!(manifest.skipped_undersized, 1);
    assert!(!patches.is_empty());
    assert_eq!(manifest.entries.len(), patches.len());

    for patch in &patches {
        let source = &images
            .iter()
            .find(|(n, _)| *n == patch.entry.source)
            .unwrap()
            .1;
        let replayed = manifest.replay(&patch.entry, source).unwrap();
        assert_eq!(replayed.hr.data(), patch.hr.data());
        assert_eq!(
            replayed.degraded.lr_clean.data(),
            patch.degraded.lr_clean.data()
        );
        assert_eq!(
            replayed.degraded.lr_noisy.data(),
            patch.degraded.lr_noisy.data()
        );
    }

    // synthesizing again from the same spec is also bit-identical
    let (m2, p2) = synthesize_corpus(&images, &s, 32, 24).unwrap();
    assert_eq!(manifest.entries, m2.entries);
    for (a, b) in patches.iter().zip(&p2) {
        assert_eq!(a.degraded.lr_noisy.data(), b.degraded.lr_noisy.data());
    }
}

#[test]
fn png_round_trip_preserves_quantized_values() {
    let dir = tempfile::tempdir().unwrap();
    let img = hr_image(20, 24, 0.9);
    let path = dir.path().join("img.png");
    img.save_png(&path).unwrap();
    let loaded = ImageBuffer::load_png(&path).unwrap();
    for (&a, &b) in img.data().iter().zip(loaded.data()) {
        let quantized = (a.clamp(0.0, 1.0) * 255.0).round() / 255.0;
        assert!((quantized - b).abs() < 1e-6);
    }
    // byte-identical re-encode
    let path2 = dir.path().join("img2.png");
    loaded.save_png(&path2).unwrap();
    let path3 = dir.path().join("img3.png");
    loaded.save_png(&path3).unwrap();
    assert_eq!(
        std::fs::read(&path2).unwrap(),
        std::fs::read(&path3).unwrap()
    );
}
