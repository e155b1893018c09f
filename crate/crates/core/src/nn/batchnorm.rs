//! 1-D batch normalization with learnable scale/shift and running statistics.
//!
//! Train mode standardizes each column by the batch mean and population
//! (biased) variance; Infer mode uses the running statistics.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    Train,
    Infer,
}

#[derive(Debug, Clone)]
pub struct BatchNorm1D {
    pub dim: usize,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub epsilon: f64,
    pub momentum: f64,
    pub mode: Mode,
}

/// Per-batch values cached by forward and consumed by backward.
#[derive(Debug, Clone)]
pub struct BatchNormCache {
    pub x_hat: Matrix,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub struct BatchNormGrads {
    pub d_input: Matrix,
    pub d_gamma: Vec<f64>,
    pub d_beta: Vec<f64>,
}

impl BatchNorm1D {
    pub fn new(dim: usize) -> Self {
        BatchNorm1D {
            dim,
            gamma: vec![1.0; dim],
            beta: vec![0.0; dim],
            running_mean: vec![0.0; dim],
            running_var: vec![1.0; dim],
            epsilon: 1e-5,
            momentum: 0.9,
            mode: Mode::Train,
        }
    }

    pub fn forward(&mut self, input: &Matrix) -> Result<(Matrix, BatchNormCache)> {
        if input.cols() != self.dim {
            return Err(Error::shape(
                format!("input with {} cols", self.dim),
                input.shape_str(),
            ));
        }
        let n = input.rows();
        let (mean, var) = match self.mode {
            Mode::Train => {
                if n < 2 {
                    return Err(Error::Data(format!(
                        "batch too small for BatchNorm train mode: {n} rows (need >= 2)"
                    )));
                }
                let mut mean = vec![0.0; self.dim];
                let mut var = vec![0.0; self.dim];
                for c in 0..self.dim {
                    let m = input.column_mean(c);
                    let v = (0..n)
                        .map(|r| (input.get(r, c) - m).powi(2))
                        .sum::<f64>()
                        / n as f64;
                    mean[c] = m;
                    var[c] = v;
                }
                // momentum blend of running stats
                for c in 0..self.dim {
                    self.running_mean[c] =
                        self.momentum * self.running_mean[c] + (1.0 - self.momentum) * mean[c];
                    self.running_var[c] =
                        self.momentum * self.running_var[c] + (1.0 - self.momentum) * var[c];
                }
                (mean, var)
            }
            Mode::Infer => (self.running_mean.clone(), self.running_var.clone()),
        };

        let mut x_hat = Matrix::zeros(n.max(0), self.dim);
        let mut out = Matrix::zeros(n, self.dim);
        for c in 0..self.dim {
            let denom = (var[c] + self.epsilon).sqrt();
            for r in 0..n {
                let xh = if denom == 0.0 {
                    0.0
                } else {
                    (input.get(r, c) - mean[c]) / denom
                };
                x_hat.set(r, c, xh);
                out.set(r, c, self.gamma[c] * xh + self.beta[c]);
            }
        }
        Ok((
            out,
            BatchNormCache {
                x_hat,
                mean,
                var,
                mode: self.mode,
            },
        ))
    }

    /// Exact gradient, including the mean and variance terms in Train mode.
    pub fn backward(&self, cache: &BatchNormCache, upstream: &Matrix) -> Result<BatchNormGrads> {
        let n = upstream.rows();
        let dim = self.dim;
        if upstream.cols() != dim {
            return Err(Error::shape(
                format!("upstream with {dim} cols"),
                upstream.shape_str(),
            ));
        }
        let mut d_gamma = vec![0.0; dim];
        let mut d_beta = vec![0.0; dim];
        for c in 0..dim {
            for r in 0..n {
                d_gamma[c] += upstream.get(r, c) * cache.x_hat.get(r, c);
                d_beta[c] += upstream.get(r, c);
            }
        }
        let mut d_input = Matrix::zeros(n, dim);
        for c in 0..dim {
            let inv_std = 1.0 / (cache.var[c] + self.epsilon).sqrt();
            match cache.mode {
                Mode::Train => {
                    let mut sum_dxhat = 0.0;
                    let mut sum_dxhat_xhat = 0.0;
                    for r in 0..n {
                        let dxhat = upstream.get(r, c) * self.gamma[c];
                        sum_dxhat += dxhat;
                        sum_dxhat_xhat += dxhat * cache.x_hat.get(r, c);
                    }
                    let nf = n as f64;
                    for r in 0..n {
                        let dxhat = upstream.get(r, c) * self.gamma[c];
                        let dx = (inv_std / nf)
                            * (nf * dxhat - sum_dxhat - cache.x_hat.get(r, c) * sum_dxhat_xhat);
                        d_input.set(r, c, dx);
                    }
                }
                Mode::Infer => {
                    for r in 0..n {
                        d_input.set(r, c, upstream.get(r, c) * self.gamma[c] * inv_std);
                    }
                }
            }
        }
        Ok(BatchNormGrads {
            d_input,
            d_gamma,
            d_beta,
        })
    }

    pub fn param_count(&self) -> usize {
        2 * self.dim
    }
}

/// Forward pass, plus gradients when an upstream gradient is supplied.
pub fn batchnorm_forward_backward(
    layer: &mut BatchNorm1D,
    input: &Matrix,
    upstream_grad: Option<&Matrix>,
) -> Result<(Matrix, Option<BatchNormGrads>)> {
    let (output, cache) = layer.forward(input)?;
    let grads = match upstream_grad {
        Some(g) => Some(layer.backward(&cache, g)?),
        None => None,
    };
    Ok((output, grads))
}
