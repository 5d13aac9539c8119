//! Corpus manifest: a JSON record of every synthesized patch, sufficient to
//! regenerate any sample bit-exactly.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image_buffer::ImageBuffer;
use crate::patches::{apply_dihedral, augment, patch_positions};
use crate::pipeline::{degrade, degrade_with, DegradationSpec, DegradeOutput, DegradeProvenance};
use crate::rng::derive_rng;

pub const MANIFEST_VERSION: u32 = 1;

/// One synthesized patch: source image, crop offset, augmentation id, and
/// the degradation draws (blur parameters or skipped, noise level or
/// skipped, plus the pinned noise-field seed).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PatchEntry {
    pub index: u64,
    pub source: String,
    pub offset_y: usize,
    pub offset_x: usize,
    pub augmentation: u8,
    #[serde(flatten)]
    pub provenance: DegradeProvenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: u32,
    pub seed: u64,
    pub spec: DegradationSpec,
    pub patch_size: usize,
    pub stride: usize,
    pub skipped_undersized: usize,
    pub entries: Vec<PatchEntry>,
}

pub struct SynthesizedPatch {
    pub entry: PatchEntry,
    pub hr: ImageBuffer,
    pub degraded: DegradeOutput,
}

/// Cut every source image into patches, augment, and degrade each patch with
/// an independent random stream derived from `(spec.seed, patch index)`.
/// Undersized images are skipped and counted.
pub fn synthesize_corpus(
    images: &[(String, ImageBuffer)],
    spec: &DegradationSpec,
    patch_size: usize,
    stride: usize,
) -> Result<(CorpusManifest, Vec<SynthesizedPatch>)> {
    spec.validate()?;
    let mut entries = Vec::new();
    let mut patches = Vec::new();
    let mut skipped = 0usize;
    let mut index = 0u64;
    for (name, img) in images {
        let Some(positions) = patch_positions(img.height(), img.width(), patch_size, stride)
        else {
            skipped += 1;
            continue;
        };
        for (y, x) in positions {
            let crop = img.crop(y, x, patch_size, patch_size)?;
            let mut rng = derive_rng(spec.seed, "patch", index);
            let (hr, aug_id) = augment(&crop, &mut rng)?;
            let degraded = degrade(&hr, spec, &mut rng)?;
            let entry = PatchEntry {
                index,
                source: name.clone(),
                offset_y: y,
                offset_x: x,
                augmentation: aug_id,
                provenance: degraded.provenance.clone(),
            };
            entries.push(entry.clone());
            patches.push(SynthesizedPatch {
                entry,
                hr,
                degraded,
            });
            index += 1;
        }
    }
    Ok((
        CorpusManifest {
            version: MANIFEST_VERSION,
            seed: spec.seed,
            spec: spec.clone(),
            patch_size,
            stride,
            skipped_undersized: skipped,
            entries,
        },
        patches,
    ))
}

impl CorpusManifest {
    /// Regenerate one recorded sample from its source image. Replay uses
    /// only the recorded draws, never the RNG, so it is bit-exact.
    pub fn replay(
        &self,
        entry: &PatchEntry,
        source: &ImageBuffer,
    ) -> Result<SynthesizedPatch> {
        let crop = source.crop(
            entry.offset_y,
            entry.offset_x,
            self.patch_size,
            self.patch_size,
        )?;
        let hr = apply_dihedral(&crop, entry.augmentation)?;
        let degraded = degrade_with(&hr, self.spec.scale_factor, &entry.provenance)?;
        Ok(SynthesizedPatch {
            entry: entry.clone(),
            hr,
            degraded,
        })
    }
}
