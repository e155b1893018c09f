//! Vanilla GAN and WGAN over firm-record feature matrices: noise
//! sampling, loss functions, training loops, the stopping rule, synthetic
//! record generation and model persistence.

pub mod bundle;
pub mod generate;
pub mod train;

pub use bundle::{load_model, load_model_with_stats, save_model};
pub use generate::generate_records;
pub use train::{train, train_observed, TrainEvent};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{Activation, MlpModel, Mode};
use crate::prng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDistribution {
    StandardNormal,
    UniformMinus1To1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub dim: usize,
    pub distribution: NoiseDistribution,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            dim: 32,
            distribution: NoiseDistribution::StandardNormal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GanMode {
    Vanilla,
    Wasserstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorLossForm {
    /// The printed minimax objective: generator minimizes mean log(1 - D(G(z))).
    MinimaxEq1,
    /// Generator maximizes mean log D(G(z)) instead; avoids early saturation.
    NonSaturating,
}

/// Network shapes and per-network batch-norm toggles. The critic is known
/// to interact poorly with batch normalization under weight clipping, so
/// each side can be toggled independently; both default to on.
#[derive(Debug, Clone)]
pub struct GanArchitecture {
    pub noise: NoiseSpec,
    pub generator_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub batchnorm_generator: bool,
    pub batchnorm_critic: bool,
    pub generator_output: Activation,
}

impl Default for GanArchitecture {
    fn default() -> Self {
        GanArchitecture {
            noise: NoiseSpec::default(),
            generator_hidden: vec![64, 64],
            critic_hidden: vec![64, 32],
            batchnorm_generator: true,
            batchnorm_critic: true,
            generator_output: Activation::Tanh,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GanModel {
    pub generator: MlpModel,
    pub critic: MlpModel,
    pub mode: GanMode,
    pub noise: NoiseSpec,
}

impl GanModel {
    pub fn new(feature_dim: usize, mode: GanMode, arch: &GanArchitecture, rng: &mut Prng) -> Self {
        let mut gen_dims = vec![arch.noise.dim];
        gen_dims.extend(&arch.generator_hidden);
        gen_dims.push(feature_dim);
        let mut gen_acts = vec![Activation::ReLU; arch.generator_hidden.len()];
        gen_acts.push(arch.generator_output);
        let generator = MlpModel::feedforward(&gen_dims, &gen_acts, arch.batchnorm_generator, rng);

        let mut critic_dims = vec![feature_dim];
        critic_dims.extend(&arch.critic_hidden);
        critic_dims.push(1);
        let mut critic_acts = vec![Activation::ReLU; arch.critic_hidden.len()];
        critic_acts.push(match mode {
            GanMode::Vanilla => Activation::Sigmoid,
            GanMode::Wasserstein => Activation::Identity,
        });
        let critic = MlpModel::feedforward(&critic_dims, &critic_acts, arch.batchnorm_critic, rng);

        GanModel {
            generator,
            critic,
            mode,
            noise: arch.noise,
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.generator.output_dim().expect("generator has layers")
    }

    /// Bind-time contract check against a dataset's feature count.
    pub fn check_feature_dim(&self, expected: usize) -> Result<()> {
        let dim = self.feature_dim();
        if dim != expected {
            return Err(Error::shape(
                format!("model with feature dim {expected}"),
                format!("feature dim {dim}"),
            ));
        }
        Ok(())
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.generator.set_mode(mode);
        self.critic.set_mode(mode);
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub clip_c: f64,
    /// Critic updates per generator update (Wasserstein only).
    pub n_critic: usize,
    /// Real-label target for the discriminator (Vanilla only).
    pub label_smooth: f64,
    pub generator_loss_form: GeneratorLossForm,
    pub seed: u64,
    /// Epoch window for the stopping rule.
    pub stop_window: usize,
    /// Holdout discriminator-accuracy band for the Vanilla stopping rule.
    pub stop_band: (f64, f64),
    /// When false, training always runs the full epoch budget.
    pub early_stop: bool,
    /// Fraction of GAN training rows held out for the stopping signal.
    pub holdout_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 120,
            batch_size: 64,
            lr: 0.0002,
            clip_c: 0.01,
            n_critic: 5,
            label_smooth: 0.9,
            generator_loss_form: GeneratorLossForm::MinimaxEq1,
            seed: 0,
            stop_window: 10,
            stop_band: (0.45, 0.55),
            early_stop: false,
            holdout_fraction: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.batch_size < 2 {
            return Err(Error::Config("batch_size must be >= 2".into()));
        }
        if self.clip_c <= 0.0 {
            return Err(Error::Config(format!(
                "clip_c must be > 0, got {}",
                self.clip_c
            )));
        }
        if self.n_critic < 1 {
            return Err(Error::Config("n_critic must be >= 1".into()));
        }
        if !(self.label_smooth > 0.5 && self.label_smooth <= 1.0) {
            return Err(Error::Config(format!(
                "label_smooth must be in (0.5, 1], got {}",
                self.label_smooth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub d_loss_train: f64,
    pub g_loss_train: f64,
    pub d_loss_holdout: f64,
    pub disc_accuracy_holdout: f64,
    /// Present in Wasserstein mode.
    pub wasserstein_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory {
    pub records: Vec<EpochRecord>,
    pub critic_updates: u64,
    pub generator_updates: u64,
}

impl LossHistory {
    /// CSV export with the fixed header
    /// `epoch,d_loss_train,g_loss_train,d_loss_holdout,disc_acc_holdout,wasserstein_estimate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epoch,d_loss_train,g_loss_train,d_loss_holdout,disc_acc_holdout,wasserstein_estimate\n",
        );
        for r in &self.records {
            let w = r
                .wasserstein_estimate
                .map(|w| format!("{w}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch, r.d_loss_train, r.g_loss_train, r.d_loss_holdout, r.disc_accuracy_holdout, w
            ));
        }
        out
    }
}

/// Noise batch of shape (n, spec.dim); deterministic given the rng state.
pub fn sample_noise(spec: &NoiseSpec, n: usize, rng: &mut Prng) -> Matrix {
    let mut m = Matrix::zeros(n, spec.dim);
    for v in m.as_mut_slice().iter_mut() {
        *v = match spec.distribution {
            NoiseDistribution::StandardNormal => rng.normal(),
            NoiseDistribution::UniformMinus1To1 => rng.uniform(-1.0, 1.0),
        };
    }
    m
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// The minimax objective value
/// `V = mean(log d_real) + mean(log(1 - d_fake))`.
pub fn gan_value_eq1(d_real: &[f64], d_fake: &[f64]) -> Result<f64> {
    for (i, &p) in d_real.iter().enumerate() {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Numeric(format!(
                "d_real[{i}] = {p} outside (0, 1]"
            )));
        }
    }
    for (i, &p) in d_fake.iter().enumerate() {
        if !(p >= 0.0 && p < 1.0) {
            return Err(Error::Numeric(format!(
                "d_fake[{i}] = {p} outside [0, 1)"
            )));
        }
    }
    Ok(mean(&d_real.iter().map(|p| p.ln()).collect::<Vec<_>>())
        + mean(&d_fake.iter().map(|p| (1.0 - p).ln()).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanillaLosses {
    pub d_loss: f64,
    pub g_loss: f64,
}

/// Discriminator loss with real-label smoothing `s`, plus the generator
/// loss under the selected form. Empty slices drop the corresponding term.
pub fn vanilla_losses(
    d_real: &[f64],
    d_fake: &[f64],
    label_smooth: f64,
    form: GeneratorLossForm,
) -> Result<VanillaLosses> {
    for (i, &p) in d_real.iter().chain(d_fake).enumerate() {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Numeric(format!(
                "probability[{i}] = {p} outside (0, 1)"
            )));
        }
    }
    let s = label_smooth;
    let real_term = mean(
        &d_real
            .iter()
            .map(|p| s * p.ln() + (1.0 - s) * (1.0 - p).ln())
            .collect::<Vec<_>>(),
    );
    let fake_term = mean(&d_fake.iter().map(|p| (1.0 - p).ln()).collect::<Vec<_>>());
    let d_loss = -real_term - fake_term;
    let g_loss = match form {
        GeneratorLossForm::MinimaxEq1 => fake_term,
        GeneratorLossForm::NonSaturating => {
            -mean(&d_fake.iter().map(|p| p.ln()).collect::<Vec<_>>())
        }
    };
    Ok(VanillaLosses { d_loss, g_loss })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WganLosses {
    pub critic_loss: f64,
    pub generator_loss: f64,
    pub wasserstein_estimate: f64,
}

/// Critic loss `mean(fake) - mean(real)`; its negation estimates the
/// Wasserstein distance.
pub fn wgan_losses(real_scores: &[f64], fake_scores: &[f64]) -> Result<WganLosses> {
    for (i, &x) in real_scores.iter().chain(fake_scores).enumerate() {
        if !x.is_finite() {
            return Err(Error::Numeric(format!("score[{i}] is not finite")));
        }
    }
    let critic_loss = mean(fake_scores) - mean(real_scores);
    Ok(WganLosses {
        critic_loss,
        generator_loss: -mean(fake_scores),
        wasserstein_estimate: -critic_loss,
    })
}

/// Stopping rule. Vanilla: the last `stop_window` holdout discriminator
/// accuracies all lie inside the band. Wasserstein: the absolute
/// Wasserstein estimate improved by less than 1% over the window.
pub fn should_stop(history: &LossHistory, config: &TrainConfig, mode: GanMode) -> bool {
    let k = config.stop_window;
    if history.records.len() < k || k == 0 {
        return false;
    }
    let window = &history.records[history.records.len() - k..];
    match mode {
        GanMode::Vanilla => window.iter().all(|r| {
            r.disc_accuracy_holdout >= config.stop_band.0
                && r.disc_accuracy_holdout <= config.stop_band.1
        }),
        GanMode::Wasserstein => {
            let first = window[0].wasserstein_estimate.unwrap_or(0.0).abs();
            let last = window[k - 1].wasserstein_estimate.unwrap_or(0.0).abs();
            if first <= 0.0 {
                return true;
            }
            (first - last) / first < 0.01
        }
    }
}
