#!/usr/bin/env python3
"""Generate golden vectors for the bicubic resizer.

Reference implementation: Keys cubic kernel (a = -0.5), center-aligned
coordinate mapping, taps = ceil(width) + 2 starting at floor(u - width/2),
weights normalized to sum 1, out-of-range taps clamped to the edge sample,
and footprint-scaled antialiasing on downscale. This is the convention of
the resizer used throughout the super-resolution literature.

The reference is cross-checked against Pillow's float-mode bicubic resize on
interior pixels (Pillow uses the same kernel and mapping but renormalizes
border taps instead of clamping, so only interior pixels are comparable).

Output: crates/degradation/tests/data/bicubic_goldens.json
"""
import json
import math
import os

import numpy as np
from PIL import Image


def cubic(x):
    ax = abs(x)
    if ax <= 1.0:
        return (1.5 * ax - 2.5) * ax * ax + 1.0
    if ax < 2.0:
        return ((-0.5 * ax + 2.5) * ax - 4.0) * ax + 2.0
    return 0.0


def contributions(in_len, out_len, scale, antialias):
    if scale < 1.0 and antialias:
        kscale = scale
        width = 4.0 / scale
    else:
        kscale = 1.0
        width = 4.0
    taps = int(math.ceil(width)) + 2
    weights = np.zeros((out_len, taps))
    indices = np.zeros((out_len, taps), dtype=int)
    for i in range(out_len):
        u = (i + 0.5) / scale - 0.5
        left = math.floor(u - width / 2.0)
        for t in range(taps):
            idx = left + t
            weights[i, t] = kscale * cubic(kscale * (u - idx))
            indices[i, t] = min(max(idx, 0), in_len - 1)
        weights[i] /= weights[i].sum()
    return weights, indices


def resize_plane(src, out_h, out_w, scale_h, scale_w, antialias):
    in_h, in_w = src.shape
    w_r, i_r = contributions(in_h, out_h, scale_h, antialias)
    tmp = np.zeros((out_h, in_w))
    for i in range(out_h):
        tmp[i] = (w_r[i][:, None] * src[i_r[i]]).sum(axis=0)
    w_c, i_c = contributions(in_w, out_w, scale_w, antialias)
    out = np.zeros((out_h, out_w))
    for j in range(out_w):
        out[:, j] = (tmp[:, i_c[j]] * w_c[j][None, :]).sum(axis=1)
    return out


def pil_resize(src, out_h, out_w):
    img = Image.fromarray(src.astype(np.float32), mode="F")
    return np.asarray(img.resize((out_w, out_h), Image.BICUBIC), dtype=np.float64)


def interior_margin(scale, antialias):
    # need u - width/2 >= 0 with u = (i + 0.5)/scale - 0.5, i.e.
    # i >= scale * (width/2 + 0.5) - 0.5
    width = 4.0 / scale if (scale < 1.0 and antialias) else 4.0
    return int(math.ceil(scale * (width / 2.0 + 0.5)))


def main():
    rng = np.random.default_rng(20240811)
    cases = []
    specs = [
        ("down_2x", 32, 24, 1, 2, True),
        ("down_4x", 48, 40, 1, 4, True),
        ("up_2x", 16, 12, 2, 1, False),
        ("up_4x", 8, 6, 4, 1, False),
    ]
    for name, in_h, in_w, num, den, antialias in specs:
        scale = num / den
        out_h = math.ceil(in_h * scale)
        out_w = math.ceil(in_w * scale)
        # multiples of 1/256 are exact in f32, keeping the golden transport
        # lossless
        src = rng.integers(0, 257, size=(in_h, in_w)).astype(np.float64) / 256.0
        expected = resize_plane(src, out_h, out_w, scale, scale, antialias)

        # cross-check against Pillow away from the borders
        ref = pil_resize(src, out_h, out_w)
        m = interior_margin(scale, antialias)
        inner = (slice(m, out_h - m), slice(m, out_w - m))
        assert expected[inner].size, f"{name}: empty interior check region"
        diff = np.abs(expected[inner] - ref[inner]).max()
        assert diff < 2e-6, f"{name}: interior disagrees with Pillow by {diff}"

        cases.append(
            dict(
                name=name,
                in_h=in_h,
                in_w=in_w,
                scale_num=num,
                scale_den=den,
                antialias=antialias,
                input=[round(v, 10) for v in src.flatten().tolist()],
                expected=expected.flatten().tolist(),
            )
        )

    out_path = os.path.join(
        os.path.dirname(__file__), "..", "crates", "degradation", "tests", "data",
        "bicubic_goldens.json",
    )
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w") as f:
        json.dump({"cases": cases}, f)
    print(f"wrote {len(cases)} cases to {out_path}")
    import PIL
    print(f"numpy {np.__version__}, pillow {PIL.__version__}")


if __name__ == "__main__":
    main()
