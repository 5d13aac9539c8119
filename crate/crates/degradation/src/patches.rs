//! Patch extraction (raster order, edge-anchored trailing windows) and
//! dihedral augmentation.

use rand::{Rng, RngCore};

use crate::error::{DegradationError, Result};
use crate::image_buffer::ImageBuffer;

/// Window start offsets along one dimension: every `stride` step whose
/// window fits, plus one edge-anchored trailing window when the strided
/// walk leaves uncovered pixels at the end.
fn offsets_1d(len: usize, patch: usize, stride: usize) -> Vec<usize> {
    assert!(stride > 0 && patch <= len);
    let mut out = Vec::new();
    let mut pos = 0;
    while pos + patch <= len {
        out.push(pos);
        pos += stride;
    }
    let last = *out.last().expect("at least one window fits");
    if last + patch < len {
        out.push(len - patch);
    }
    out
}

/// All `(y, x)` crop positions of `patch`-sized windows in raster order.
/// Returns `None` when the image is too small (the caller counts skips).
pub fn patch_positions(
    height: usize,
    width: usize,
    patch: usize,
    stride: usize,
) -> Option<Vec<(usize, usize)>> {
    if height < patch || width < patch || stride == 0 {
        return None;
    }
    let ys = offsets_1d(height, patch, stride);
    let xs = offsets_1d(width, patch, stride);
    let mut out = Vec::with_capacity(ys.len() * xs.len());
    for &y in &ys {
        for &x in &xs {
            out.push((y, x));
        }
    }
    Some(out)
}

/// Number of dihedral transforms: 4 rotations x optional horizontal flip.
pub const DIHEDRAL_COUNT: u8 = 8;

/// Apply dihedral transform `id` in `0..8` to a square patch: first a
/// horizontal flip when `id >= 4`, then `id % 4` counter-clockwise quarter
/// turns. `id = 0` is the identity.
pub fn apply_dihedral(img: &ImageBuffer, id: u8) -> Result<ImageBuffer> {
    if id >= DIHEDRAL_COUNT {
        return Err(DegradationError::InvalidConfig(format!(
            "dihedral id {id} out of range"
        )));
    }
    let n = img.height();
    if img.width() != n {
        return Err(DegradationError::InvalidConfig(format!(
            "dihedral transforms need a square patch, got {}x{}",
            img.height(),
            img.width()
        )));
    }
    let rot = id % 4;
    let flip = id >= 4;
    let mut out = ImageBuffer::new(n, n);
    for y in 0..n {
        for x in 0..n {
            let (mut sy, mut sx) = (y, x);
            // invert the rotation to find the source pixel: output = rot_ccw^rot(flipped)
            for _ in 0..rot {
                // inverse of one CCW turn is one CW turn: (y, x) <- (x, n-1-y)
                let (ny, nx) = (sx, n - 1 - sy);
                sy = ny;
                sx = nx;
            }
            if flip {
                sx = n - 1 - sx;
            }
            for c in 0..ImageBuffer::CHANNELS {
                out.set(y, x, c, img.get(sy, sx, c));
            }
        }
    }
    Ok(out)
}

/// Inverse transform id such that applying `id` then `invert_dihedral(id)`
/// restores the original patch.
pub fn invert_dihedral(id: u8) -> u8 {
    let rot = id % 4;
    let flip = id >= 4;
    if !flip {
        (4 - rot) % 4
    } else {
        // flip then rotate is an involution composed with itself
        id
    }
}

/// Draw one of the 8 dihedral transforms uniformly and apply it. Returns the
/// transformed patch and the drawn id (recorded in corpus manifests).
pub fn augment(patch: &ImageBuffer, rng: &mut impl RngCore) -> Result<(ImageBuffer, u8)> {
    let id = rng.random_range(0..DIHEDRAL_COUNT);
    Ok((apply_dihedral(patch, id)?, id))
}
