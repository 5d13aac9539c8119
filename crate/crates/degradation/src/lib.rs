//! Degradation operators and seeded training-data synthesis.
//!
//! Implements the blur -> bicubic-downsample -> additive-noise pipeline that
//! turns high-resolution RGB images into low-resolution training inputs,
//! along with patch extraction, dihedral augmentation, and a corpus manifest
//! that makes every synthesized sample bit-exactly reproducible.
//!
//! Everything here is a pure function of its inputs and an explicit seed;
//! values stay in floating point in `[0,1]` and are clamped/quantized only
//! when writing 8-bit files.

mod error;
mod image_buffer;
mod kernel;
mod manifest;
mod patches;
mod pipeline;
pub mod resize;
pub mod rng;

pub use error::{DegradationError, Result};
pub use image_buffer::ImageBuffer;
pub use kernel::{blur, make_gaussian_kernel, BlurKernel};
pub use manifest::{synthesize_corpus, CorpusManifest, PatchEntry, SynthesizedPatch};
pub use patches::{apply_dihedral, augment, invert_dihedral, patch_positions, DIHEDRAL_COUNT};
pub use pipeline::{
    add_gaussian_noise, degrade, degrade_with, BlurParams, DegradationSpec, DegradeOutput,
    DegradeProvenance, NoiseParams,
};
pub use resize::{bicubic_resize, Scale};
