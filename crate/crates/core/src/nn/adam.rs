//! Adam optimizer state and update step, plus hard weight clipping.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl AdamState {
    /// Defaults from the training setup: beta1 = 0.9, beta2 = 0.999,
    /// eps_hat = 1e-8.
    pub fn new(param_count: usize, lr: f64) -> Self {
        AdamState {
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            step_count: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps_hat: 1e-8,
        }
    }
}

/// Standard bias-corrected Adam update; increments `step_count` by one.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first_moment.len() {
        return Err(Error::shape(
            format!("{} parameters", state.first_moment.len()),
            format!("{} params, {} grads", params.len(), grads.len()),
        ));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite gradient at parameter index {i}"
        )));
    }
    state.step_count += 1;
    let t = state.step_count;
    let bc1 = 1.0 - state.beta1.powi(t as i32);
    let bc2 = 1.0 - state.beta2.powi(t as i32);
    for i in 0..params.len() {
        let m = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * grads[i];
        let v = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        state.first_moment[i] = m;
        state.second_moment[i] = v;
        let m_hat = m / bc1;
        let v_hat = v / bc2;
        params[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps_hat);
    }
    Ok(())
}

/// Project every parameter into `[-c, c]`. Values already inside are
/// returned bitwise unchanged.
pub fn clip_weights(params: &mut [f64], c: f64) -> Result<()> {
    if c <= 0.0 {
        return Err(Error::Config(format!("clip constant must be > 0, got {c}")));
    }
    for p in params.iter_mut() {
        if *p > c {
            *p = c;
        } else if *p < -c {
            *p = -c;
        }
    }
    Ok(())
}
