//! Flat experiment configuration.
//!
//! Grammar, one entry per line:
//!   section.key = value
//! `#` starts a comment (whole line or trailing). Blank lines are ignored.
//! Values are scalars, or comma-separated lists where noted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use scf_ganlab_core::classifiers::{ClassifierConfig, ClassifierKind};
use scf_ganlab_core::data::world::WorldConfig;
use scf_ganlab_core::gan::{GanArchitecture, GanMode, TrainConfig};
use scf_ganlab_core::nn::Activation;
use scf_ganlab_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldKind {
    Default,
    StrongSignal,
    NoSignal,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub world_kind: WorldKind,
    pub world_n: usize,
    pub world_rate: f64,
    pub gan: TrainConfig,
    pub gan_mode: GanMode,
    pub architecture: GanArchitecture,
    pub classifiers: Vec<ClassifierConfig>,
    pub augment_target_ratio: f64,
    pub split_fraction: f64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            world_kind: WorldKind::Default,
            world_n: 2000,
            world_rate: 0.05,
            gan: TrainConfig::default(),
            gan_mode: GanMode::Wasserstein,
            architecture: GanArchitecture::default(),
            classifiers: vec![
                ClassifierConfig::new(ClassifierKind::LogReg),
                ClassifierConfig::new(ClassifierKind::LinearSvm),
                ClassifierConfig::new(ClassifierKind::MlpBp),
            ],
            augment_target_ratio: 1.0,
            split_fraction: 0.7,
            seeds: vec![0],
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classifiers.is_empty() {
            return Err(Error::Config("at least one classifier is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be non-empty".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::Config(format!(
                "split.fraction must be in (0,1), got {}",
                self.split_fraction
            )));
        }
        if self.augment_target_ratio <= 0.0 {
            return Err(Error::Config(format!(
                "augment.target_ratio must be > 0, got {}",
                self.augment_target_ratio
            )));
        }
        self.gan.validate()?;
        for c in &self.classifiers {
            c.validate()?;
        }
        Ok(())
    }

    /// World for a specific run seed.
    pub fn world(&self, seed: u64) -> WorldConfig {
        let mut cfg = match self.world_kind {
            WorldKind::Default => WorldConfig::default_world(seed),
            WorldKind::StrongSignal => WorldConfig::strong_signal(seed),
            WorldKind::NoSignal => WorldConfig::no_signal(seed, self.world_rate),
        };
        cfg.n = self.world_n;
        cfg
    }

    /// Seed every stage from one run seed, keeping stages decorrelated.
    pub fn reseed(&mut self, seed: u64) {
        self.gan.seed = seed.wrapping_mul(2).wrapping_add(1);
        for (i, c) in self.classifiers.iter_mut().enumerate() {
            c.seed = seed.wrapping_mul(1000).wrapping_add(i as u64);
        }
        self.seeds = vec![seed];
    }
}

/// Raw `section.key -> value` map, in file order for the echo.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `section.key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !key.contains('.') {
            return Err(Error::Config(format!(
                "line {}: key {key:?} must be of the form section.key",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got {value:?}"))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| parse_as::<T>(key, s.trim()))
        .collect()
}

pub fn load_config(path: &Path) -> Result<(ExperimentConfig, BTreeMap<String, String>)> {
    let text = std::fs::read_to_string(path)?;
    let map = parse_flat(&text)?;
    let config = apply(&map)?;
    Ok((config, map))
}

pub fn apply(map: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut classifier_kinds: Option<Vec<ClassifierKind>> = None;
    let mut clf_epochs: Option<usize> = None;
    let mut clf_lr: Option<f64> = None;
    let mut clf_hidden: Option<Vec<usize>> = None;

    for (key, value) in map {
        match key.as_str() {
            "world.kind" => {
                cfg.world_kind = match value.as_str() {
                    "default" => WorldKind::Default,
                    "strong_signal" => WorldKind::StrongSignal,
                    "no_signal" => WorldKind::NoSignal,
                    _ => {
                        return Err(Error::Config(format!(
                            "world.kind: expected default|strong_signal|no_signal, got {value:?}"
                        )))
                    }
                }
            }
            "world.n" => cfg.world_n = parse_as(key, value)?,
            "world.rate" => cfg.world_rate = parse_as(key, value)?,
            "gan.mode" => cfg.gan_mode = parse_gan_mode(value)?,
            "gan.epochs" => cfg.gan.epochs = parse_as(key, value)?,
            "gan.batch_size" => cfg.gan.batch_size = parse_as(key, value)?,
            "gan.lr" => cfg.gan.lr = parse_as(key, value)?,
            "gan.clip_c" => cfg.gan.clip_c = parse_as(key, value)?,
            "gan.n_critic" => cfg.gan.n_critic = parse_as(key, value)?,
            "gan.label_smooth" => cfg.gan.label_smooth = parse_as(key, value)?,
            "gan.seed" => cfg.gan.seed = parse_as(key, value)?,
            "gan.early_stop" => cfg.gan.early_stop = parse_bool(key, value)?,
            "gan.noise_dim" => cfg.architecture.noise.dim = parse_as(key, value)?,
            "gan.generator_hidden" => cfg.architecture.generator_hidden = parse_list(key, value)?,
            "gan.critic_hidden" => cfg.architecture.critic_hidden = parse_list(key, value)?,
            "gan.batchnorm_generator" => {
                cfg.architecture.batchnorm_generator = parse_bool(key, value)?
            }
            "gan.batchnorm_critic" => cfg.architecture.batchnorm_critic = parse_bool(key, value)?,
            "gan.generator_output" => {
                cfg.architecture.generator_output = match value.as_str() {
                    "tanh" => Activation::Tanh,
                    "identity" => Activation::Identity,
                    _ => {
                        return Err(Error::Config(format!(
                            "gan.generator_output: expected tanh|identity, got {value:?}"
                        )))
                    }
                }
            }
            "classifiers.kinds" => {
                classifier_kinds = Some(
                    value
                        .split(',')
                        .map(|s| ClassifierKind::parse(s.trim()))
                        .collect::<Result<_>>()?,
                )
            }
            "classifiers.epochs" => clf_epochs = Some(parse_as(key, value)?),
            "classifiers.lr" => clf_lr = Some(parse_as(key, value)?),
            "classifiers.hidden_dims" => clf_hidden = Some(parse_list(key, value)?),
            "augment.target_ratio" => cfg.augment_target_ratio = parse_as(key, value)?,
            "split.fraction" => cfg.split_fraction = parse_as(key, value)?,
            "run.seeds" => cfg.seeds = parse_list(key, value)?,
            "run.output_dir" => cfg.output_dir = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown config key: {other}"))),
        }
    }

    if let Some(kinds) = classifier_kinds {
        cfg.classifiers = kinds.into_iter().map(ClassifierConfig::new).collect();
    }
    for c in &mut cfg.classifiers {
        if let Some(e) = clf_epochs {
            c.epochs = e;
        }
        if let Some(lr) = clf_lr {
            c.lr = lr;
        }
        if let Some(h) = &clf_hidden {
            c.hidden_dims = h.clone();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_gan_mode(value: &str) -> Result<GanMode> {
    match value {
        "vanilla" => Ok(GanMode::Vanilla),
        "wgan" => Ok(GanMode::Wasserstein),
        _ => Err(Error::Config(format!(
            "mode: expected vanilla|wgan, got {value:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let text = "\
# a comment
world.kind = strong_signal
world.n = 500
gan.epochs = 10   # trailing comment
run.seeds = 1, 2, 3
";
        let map = parse_flat(text).unwrap();
        let cfg = apply(&map).unwrap();
        assert_eq!(cfg.world_kind, WorldKind::StrongSignal);
        assert_eq!(cfg.world_n, 500);
        assert_eq!(cfg.gan.epochs, 10);
        assert_eq!(cfg.seeds, vec![1, 2, 3]);
    }

    #[test]
    fn unknown_key_is_config_error() {
        let map = parse_flat("foo.bar = 1\n").unwrap();
        let err = apply(&map).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_flat("world.kind default\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn classifier_overrides_apply() {
        let map = parse_flat(
            "classifiers.kinds = logreg, mlp_bp\nclassifiers.epochs = 42\n",
        )
        .unwrap();
        let cfg = apply(&map).unwrap();
        assert_eq!(cfg.classifiers.len(), 2);
        assert!(cfg.classifiers.iter().all(|c| c.epochs == 42));
    }
}
