#!/usr/bin/env python3
"""Generate SSIM golden values with scikit-image.

Parameters match the original SSIM definition: 11x11 Gaussian window with
sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0, biased (population)
covariances. scikit-image with gaussian_weights=True and
use_sample_covariance=False computes exactly that; per-channel scores are
averaged over RGB.

Output: crates/metrics/tests/data/ssim_goldens.json
"""
import json
import os

import numpy as np
import skimage
from skimage.metrics import structural_similarity


def ssim_rgb(a, b):
    vals = [
        structural_similarity(
            a[..., c],
            b[..., c],
            win_size=11,
            gaussian_weights=True,
            sigma=1.5,
            K1=0.01,
            K2=0.03,
            use_sample_covariance=False,
            data_range=1.0,
        )
        for c in range(3)
    ]
    return float(np.mean(vals))


def main():
    rng = np.random.default_rng(77)
    cases = []

    def grid(h, w):
        yy, xx = np.mgrid[0:h, 0:w]
        base = 0.5 + 0.25 * np.sin(xx / 3.0) * np.cos(yy / 4.0)
        return np.stack([base, base * 0.9 + 0.05, base * 1.1 - 0.05], axis=-1)

    # structured image vs noisy copy
    a = grid(24, 20)
    noise = rng.normal(0, 0.05, a.shape)
    b = np.clip(a + noise, 0, 1)
    a_q = np.round(a * 256) / 256.0
    b_q = np.round(b * 256) / 256.0
    cases.append(
        dict(
            name="structured_vs_noisy",
            h=24,
            w=20,
            a=a_q.flatten().tolist(),
            b=b_q.flatten().tolist(),
            ssim=ssim_rgb(a_q, b_q),
        )
    )

    # two independent random fields
    a = np.round(rng.uniform(0, 1, (16, 16, 3)) * 256) / 256.0
    b = np.round(rng.uniform(0, 1, (16, 16, 3)) * 256) / 256.0
    cases.append(
        dict(
            name="independent_noise",
            h=16,
            w=16,
            a=a.flatten().tolist(),
            b=b.flatten().tolist(),
            ssim=ssim_rgb(a, b),
        )
    )

    # smooth vs shifted contrast
    base = grid(20, 24)
    shifted = np.clip(base * 0.7 + 0.2, 0, 1)
    base_q = np.round(base * 256) / 256.0
    shifted_q = np.round(shifted * 256) / 256.0
    cases.append(
        dict(
            name="contrast_shift",
            h=20,
            w=24,
            a=base_q.flatten().tolist(),
            b=shifted_q.flatten().tolist(),
            ssim=ssim_rgb(base_q, shifted_q),
        )
    )

    out_path = os.path.join(
        os.path.dirname(__file__), "..", "crates", "metrics", "tests", "data",
        "ssim_goldens.json",
    )
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w") as f:
        json.dump({"cases": cases}, f)
    print(f"wrote {len(cases)} cases (skimage {skimage.__version__})")


if __name__ == "__main__":
    main()
