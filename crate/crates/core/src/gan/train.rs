//! GAN training loops.
//!
//! Wasserstein mode runs `n_critic` critic updates (each followed by
//! weight clipping) per generator update, so
//! `critic_updates = n_critic * generator_updates` holds exactly. Vanilla
//! mode alternates one discriminator update and one generator update per
//! batch, with label smoothing on the discriminator's real targets.
//!
//! A holdout slice (`holdout_fraction` of the input rows, fixed per seed)
//! feeds the per-epoch discriminator-accuracy and Wasserstein traces that
//! drive the stopping rule.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{adam_step, clip_weights, AdamState, Mode};
use crate::prng::Prng;

use super::{
    sample_noise, should_stop, EpochRecord, GanMode, GanModel, GeneratorLossForm, LossHistory,
    TrainConfig,
};

/// Observer events emitted during training; used by tests to verify loop
/// accounting and the clipping invariant.
pub enum TrainEvent<'a> {
    CriticUpdated { params: &'a [f64] },
    GeneratorUpdated,
}

const PROB_CLAMP: f64 = 1e-12;

pub fn train(
    features: &Matrix,
    config: &TrainConfig,
    model: GanModel,
) -> Result<(GanModel, LossHistory)> {
    train_observed(features, config, model, |_| {})
}

pub fn train_observed(
    features: &Matrix,
    config: &TrainConfig,
    mut model: GanModel,
    mut observe: impl FnMut(TrainEvent),
) -> Result<(GanModel, LossHistory)> {
    config.validate()?;
    model.check_feature_dim(features.cols())?;
    let n = features.rows();
    if n < config.batch_size {
        return Err(Error::Data(format!(
            "dataset has {n} rows, smaller than one batch of {}",
            config.batch_size
        )));
    }
    features.check_finite("gan training features")?;

    // holdout fixed per seed; shrunk so at least one batch remains
    let mut split_rng = Prng::with_stream(config.seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    split_rng.shuffle(&mut order);
    let holdout_n = ((config.holdout_fraction * n as f64).floor() as usize)
        .min(n - config.batch_size);
    let holdout_idx: Vec<usize> = order[..holdout_n].to_vec();
    let mut train_idx: Vec<usize> = order[holdout_n..].to_vec();
    train_idx.sort_unstable();
    // with no holdout rows the stopping signal is computed on training rows
    let holdout = if holdout_idx.is_empty() {
        features.select_rows(&train_idx)
    } else {
        features.select_rows(&holdout_idx)
    };

    let mut rng = Prng::with_stream(config.seed, 1);
    let mut gen_opt = AdamState::new(model.generator.param_count(), config.lr);
    let mut critic_opt = AdamState::new(model.critic.param_count(), config.lr);

    let mut history = LossHistory::default();
    model.set_mode(Mode::Train);

    for epoch in 1..=config.epochs {
        rng.shuffle(&mut train_idx);
        let n_batches = train_idx.len() / config.batch_size;
        let batch = |b: usize| -> Matrix {
            let idx = &train_idx[b * config.batch_size..(b + 1) * config.batch_size];
            features.select_rows(idx)
        };

        let mut d_losses = Vec::new();
        let mut g_losses = Vec::new();
        match model.mode {
            GanMode::Wasserstein => {
                for step in 0..n_batches {
                    for k in 0..config.n_critic {
                        let real = batch((step * config.n_critic + k) % n_batches);
                        let d_loss = critic_step_wgan(
                            &mut model,
                            &real,
                            config,
                            &mut critic_opt,
                            &mut rng,
                        )?;
                        d_losses.push(d_loss);
                        history.critic_updates += 1;
                        observe(TrainEvent::CriticUpdated {
                            params: &model.critic.params_flat(),
                        });
                    }
                    let g_loss =
                        generator_step_wgan(&mut model, config, &mut gen_opt, &mut rng)?;
                    g_losses.push(g_loss);
                    history.generator_updates += 1;
                    observe(TrainEvent::GeneratorUpdated);
                }
            }
            GanMode::Vanilla => {
                for step in 0..n_batches {
                    let real = batch(step);
                    let d_loss =
                        disc_step_vanilla(&mut model, &real, config, &mut critic_opt, &mut rng)?;
                    d_losses.push(d_loss);
                    history.critic_updates += 1;
                    observe(TrainEvent::CriticUpdated {
                        params: &model.critic.params_flat(),
                    });
                    let g_loss =
                        generator_step_vanilla(&mut model, config, &mut gen_opt, &mut rng)?;
                    g_losses.push(g_loss);
                    history.generator_updates += 1;
                    observe(TrainEvent::GeneratorUpdated);
                }
            }
        }

        let record = evaluate_epoch(&mut model, &holdout, config, epoch, &d_losses, &g_losses, &mut rng)?;
        history.records.push(record);
        if config.early_stop && should_stop(&history, config, model.mode) {
            break;
        }
    }

    model.set_mode(Mode::Infer);
    Ok((model, history))
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn generate_fake(model: &mut GanModel, n: usize, rng: &mut Prng) -> Result<Matrix> {
    let noise = sample_noise(&model.noise, n, rng);
    model.generator.forward(&noise)
}

fn critic_step_wgan(
    model: &mut GanModel,
    real: &Matrix,
    config: &TrainConfig,
    opt: &mut AdamState,
    rng: &mut Prng,
) -> Result<f64> {
    let n = real.rows() as f64;
    let fake = generate_fake(model, real.rows(), rng)?;

    let (real_scores, real_caches) = model.critic.forward_cached(real)?;
    let (fake_scores, fake_caches) = model.critic.forward_cached(&fake)?;
    let loss = mean(fake_scores.as_slice()) - mean(real_scores.as_slice());

    let up_real = Matrix::from_vec(real.rows(), 1, vec![-1.0 / n; real.rows()]);
    let up_fake = Matrix::from_vec(real.rows(), 1, vec![1.0 / n; real.rows()]);
    let (_, grads_real) = model.critic.backward(&real_caches, &up_real)?;
    let (_, grads_fake) = model.critic.backward(&fake_caches, &up_fake)?;
    let grads: Vec<f64> = grads_real
        .iter()
        .zip(&grads_fake)
        .map(|(a, b)| a + b)
        .collect();

    let mut params = model.critic.params_flat();
    adam_step(&mut params, &grads, opt)?;
    clip_weights(&mut params, config.clip_c)?;
    model.critic.set_params_flat(&params)?;
    Ok(loss)
}

fn generator_step_wgan(
    model: &mut GanModel,
    config: &TrainConfig,
    opt: &mut AdamState,
    rng: &mut Prng,
) -> Result<f64> {
    let n = config.batch_size;
    let noise = sample_noise(&model.noise, n, rng);
    let (fake, gen_caches) = model.generator.forward_cached(&noise)?;
    let (scores, critic_caches) = model.critic.forward_cached(&fake)?;
    let loss = -mean(scores.as_slice());

    let up = Matrix::from_vec(n, 1, vec![-1.0 / n as f64; n]);
    let (d_fake, _) = model.critic.backward(&critic_caches, &up)?;
    let (_, gen_grads) = model.generator.backward(&gen_caches, &d_fake)?;

    let mut params = model.generator.params_flat();
    adam_step(&mut params, &gen_grads, opt)?;
    model.generator.set_params_flat(&params)?;
    Ok(loss)
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

fn disc_step_vanilla(
    model: &mut GanModel,
    real: &Matrix,
    config: &TrainConfig,
    opt: &mut AdamState,
    rng: &mut Prng,
) -> Result<f64> {
    let n = real.rows() as f64;
    let s = config.label_smooth;
    let fake = generate_fake(model, real.rows(), rng)?;

    let (p_real, real_caches) = model.critic.forward_cached(real)?;
    let (p_fake, fake_caches) = model.critic.forward_cached(&fake)?;

    let mut loss = 0.0;
    let mut up_real = Matrix::zeros(real.rows(), 1);
    for r in 0..real.rows() {
        let p = clamp_prob(p_real.get(r, 0));
        loss -= (s * p.ln() + (1.0 - s) * (1.0 - p).ln()) / n;
        up_real.set(r, 0, -(s / p - (1.0 - s) / (1.0 - p)) / n);
    }
    let mut up_fake = Matrix::zeros(real.rows(), 1);
    for r in 0..real.rows() {
        let p = clamp_prob(p_fake.get(r, 0));
        loss -= (1.0 - p).ln() / n;
        up_fake.set(r, 0, 1.0 / ((1.0 - p) * n));
    }

    let (_, grads_real) = model.critic.backward(&real_caches, &up_real)?;
    let (_, grads_fake) = model.critic.backward(&fake_caches, &up_fake)?;
    let grads: Vec<f64> = grads_real
        .iter()
        .zip(&grads_fake)
        .map(|(a, b)| a + b)
        .collect();

    let mut params = model.critic.params_flat();
    adam_step(&mut params, &grads, opt)?;
    model.critic.set_params_flat(&params)?;
    Ok(loss)
}

fn generator_step_vanilla(
    model: &mut GanModel,
    config: &TrainConfig,
    opt: &mut AdamState,
    rng: &mut Prng,
) -> Result<f64> {
    let n = config.batch_size;
    let noise = sample_noise(&model.noise, n, rng);
    let (fake, gen_caches) = model.generator.forward_cached(&noise)?;
    let (p_fake, critic_caches) = model.critic.forward_cached(&fake)?;

    let nf = n as f64;
    let mut loss = 0.0;
    let mut up = Matrix::zeros(n, 1);
    for r in 0..n {
        let p = clamp_prob(p_fake.get(r, 0));
        match config.generator_loss_form {
            GeneratorLossForm::MinimaxEq1 => {
                loss += (1.0 - p).ln() / nf;
                up.set(r, 0, -1.0 / ((1.0 - p) * nf));
            }
            GeneratorLossForm::NonSaturating => {
                loss -= p.ln() / nf;
                up.set(r, 0, -1.0 / (p * nf));
            }
        }
    }

    let (d_fake, _) = model.critic.backward(&critic_caches, &up)?;
    let (_, gen_grads) = model.generator.backward(&gen_caches, &d_fake)?;

    let mut params = model.generator.params_flat();
    adam_step(&mut params, &gen_grads, opt)?;
    model.generator.set_params_flat(&params)?;
    Ok(loss)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_epoch(
    model: &mut GanModel,
    holdout: &Matrix,
    config: &TrainConfig,
    epoch: usize,
    d_losses: &[f64],
    g_losses: &[f64],
    rng: &mut Prng,
) -> Result<EpochRecord> {
    model.set_mode(Mode::Infer);
    let fake = generate_fake(model, holdout.rows(), rng)?;
    let real_out = model.critic.forward(holdout)?;
    let fake_out = model.critic.forward(&fake)?;
    model.set_mode(Mode::Train);

    let real_scores = real_out.as_slice();
    let fake_scores = fake_out.as_slice();
    let total = (real_scores.len() + fake_scores.len()) as f64;

    let (d_loss_holdout, accuracy, wasserstein) = match model.mode {
        GanMode::Wasserstein => {
            let losses = super::wgan_losses(real_scores, fake_scores)?;
            // the critic has no probability scale; classify against the
            // midpoint of the two score means
            let thr = (mean(real_scores) + mean(fake_scores)) / 2.0;
            let correct = real_scores.iter().filter(|&&x| x > thr).count()
                + fake_scores.iter().filter(|&&x| x <= thr).count();
            (
                losses.critic_loss,
                correct as f64 / total,
                Some(losses.wasserstein_estimate),
            )
        }
        GanMode::Vanilla => {
            let s = config.label_smooth;
            let real_term: f64 = real_scores
                .iter()
                .map(|&p| {
                    let p = clamp_prob(p);
                    s * p.ln() + (1.0 - s) * (1.0 - p).ln()
                })
                .sum::<f64>()
                / real_scores.len() as f64;
            let fake_term: f64 = fake_scores
                .iter()
                .map(|&p| (1.0 - clamp_prob(p)).ln())
                .sum::<f64>()
                / fake_scores.len() as f64;
            let correct = real_scores.iter().filter(|&&p| p >= 0.5).count()
                + fake_scores.iter().filter(|&&p| p < 0.5).count();
            (-real_term - fake_term, correct as f64 / total, None)
        }
    };

    Ok(EpochRecord {
        epoch,
        d_loss_train: mean(d_losses),
        g_loss_train: mean(g_losses),
        d_loss_holdout,
        disc_accuracy_holdout: accuracy,
        wasserstein_estimate: wasserstein,
    })
}
