//! Deterministic 64-bit neural-network primitives: dense and batch-norm
//! layers with explicit forward/backward passes, the Adam optimizer, hard
//! weight clipping, and a finite-difference gradient checker.

pub mod activation;
pub mod adam;
pub mod batchnorm;
pub mod dense;
pub mod gradcheck;
pub mod model;

pub use activation::{sigmoid, Activation};
pub use adam::{adam_step, clip_weights, AdamState};
pub use batchnorm::{batchnorm_forward_backward, BatchNorm1D, Mode};
pub use dense::{dense_forward_backward, DenseLayer};
pub use gradcheck::{finite_difference_check, half_sq_norm, LossFn};
pub use model::{Layer, LayerCache, LayerSpec, MlpModel};
