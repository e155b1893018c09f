//! Core library for the supply-chain credit-risk GAN lab: deterministic
//! numerics, from-scratch neural networks, GAN training with weight
//! clipping, data handling, baseline classifiers and evaluation metrics.

pub mod classifiers;
pub mod data;
pub mod error;
pub mod gan;
pub mod matrix;
pub mod metrics;
pub mod nn;
pub mod prng;

pub use classifiers::{ClassifierConfig, ClassifierKind, Predictions, TrainedClassifier};
pub use data::{Dataset, FirmRecord, IndicatorSchema, Industry, NormStats};
pub use error::{Error, Result};
pub use gan::{GanMode, GanModel, LossHistory, TrainConfig};
pub use matrix::Matrix;
pub use metrics::{ConfusionMatrix, MetricsRow, RocCurve};
pub use nn::MlpModel;
pub use prng::Prng;
