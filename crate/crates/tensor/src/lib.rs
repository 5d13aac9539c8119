//! Minimal dense-tensor compute core with reverse-mode automatic
//! differentiation.
//!
//! The operator set is exactly what a stacked warp-and-fuse super-resolution
//! network needs: `conv2d`, `leaky_relu`, `pixel_shuffle`, bilinear warping by
//! per-pixel offset fields (`grid_sample_offsets`), channel concatenation,
//! `l1_loss`, and a bias-corrected Adam optimizer. Tensors are immutable once
//! produced; a computation graph is built and consumed by a single thread of
//! control, and `backward` accumulates gradients on every tensor that
//! requires them.
//!
//! Everything is generic over the element type: `f32` for training and
//! inference, `f64` for finite-difference gradient checks.

mod adam;
mod element;
mod error;
pub mod gradcheck;
mod ops;
mod tensor;

pub use adam::{Adam, AdamHyperParams, MomentSlot};
pub use element::{Element, Precision};
pub use error::{Result, TensorError};
pub use ops::concat::{concat_channels, slice_channels};
pub use ops::conv::conv2d;
pub use ops::elementwise::{add, leaky_relu, scale};
pub use ops::loss::l1_loss;
pub use ops::sample::grid_sample_offsets;
pub use ops::shuffle::{pixel_shuffle, pixel_unshuffle};
pub use tensor::Tensor;
