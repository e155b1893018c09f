//! Fixed-composition MLP: an ordered stack of dense, batch-norm and
//! activation layers with explicit forward/backward passes and a flat
//! parameter view for the optimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::prng::Prng;

use super::activation::Activation;
use super::batchnorm::{BatchNorm1D, BatchNormCache, Mode};
use super::dense::DenseLayer;

#[derive(Debug, Clone)]
pub enum Layer {
    Dense(DenseLayer),
    BatchNorm(BatchNorm1D),
    Activation(Activation),
}

/// Serializable description of one layer, used by the model bundle format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Dense { in_dim: usize, out_dim: usize },
    BatchNorm { dim: usize },
    Activation { activation: Activation },
}

#[derive(Debug, Clone, Default)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
}

/// Per-layer values cached during a forward pass.
pub enum LayerCache {
    Dense { input: Matrix },
    BatchNorm { input_rows: usize, cache: BatchNormCache },
    Activation { input: Matrix },
}

impl MlpModel {
    pub fn new(layers: Vec<Layer>) -> Self {
        MlpModel { layers }
    }

    /// Stack of Glorot-initialized dense layers with the given activations,
    /// optionally batch-normalized after each hidden affine transform.
    pub fn feedforward(
        dims: &[usize],
        activations: &[Activation],
        batchnorm: bool,
        rng: &mut Prng,
    ) -> Self {
        assert_eq!(dims.len(), activations.len() + 1);
        let mut layers = Vec::new();
        for (i, act) in activations.iter().enumerate() {
            layers.push(Layer::Dense(DenseLayer::glorot(dims[i], dims[i + 1], rng)));
            let is_last = i == activations.len() - 1;
            if batchnorm && !is_last {
                layers.push(Layer::BatchNorm(BatchNorm1D::new(dims[i + 1])));
            }
            layers.push(Layer::Activation(*act));
        }
        MlpModel { layers }
    }

    pub fn input_dim(&self) -> Option<usize> {
        self.layers.iter().find_map(|l| match l {
            Layer::Dense(d) => Some(d.in_dim),
            _ => None,
        })
    }

    pub fn output_dim(&self) -> Option<usize> {
        self.layers.iter().rev().find_map(|l| match l {
            Layer::Dense(d) => Some(d.out_dim),
            _ => None,
        })
    }

    pub fn set_mode(&mut self, mode: Mode) {
        for layer in &mut self.layers {
            if let Layer::BatchNorm(bn) = layer {
                bn.mode = mode;
            }
        }
    }

    pub fn forward(&mut self, input: &Matrix) -> Result<Matrix> {
        Ok(self.forward_cached(input)?.0)
    }

    pub fn forward_cached(&mut self, input: &Matrix) -> Result<(Matrix, Vec<LayerCache>)> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in &mut self.layers {
            x = match layer {
                Layer::Dense(d) => {
                    let out = d.forward(&x)?;
                    caches.push(LayerCache::Dense { input: x });
                    out
                }
                Layer::BatchNorm(bn) => {
                    let (out, cache) = bn.forward(&x)?;
                    caches.push(LayerCache::BatchNorm {
                        input_rows: x.rows(),
                        cache,
                    });
                    out
                }
                Layer::Activation(a) => {
                    let out = a.forward(&x);
                    caches.push(LayerCache::Activation { input: x });
                    out
                }
            };
        }
        Ok((x, caches))
    }

    /// Backpropagate `upstream` (d loss / d output) through the cached
    /// forward pass. Returns the input gradient and the flat parameter
    /// gradient in `params_flat` order.
    pub fn backward(&self, caches: &[LayerCache], upstream: &Matrix) -> Result<(Matrix, Vec<f64>)> {
        assert_eq!(caches.len(), self.layers.len());
        let mut grad = upstream.clone();
        // per-layer grads collected in reverse, then flattened forward
        let mut per_layer: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len()];
        for (i, (layer, cache)) in self.layers.iter().zip(caches).enumerate().rev() {
            grad = match (layer, cache) {
                (Layer::Dense(d), LayerCache::Dense { input }) => {
                    let g = d.backward(input, &grad)?;
                    let mut flat = g.d_weights.as_slice().to_vec();
                    flat.extend_from_slice(&g.d_bias);
                    per_layer[i] = flat;
                    g.d_input
                }
                (Layer::BatchNorm(bn), LayerCache::BatchNorm { cache, .. }) => {
                    let g = bn.backward(cache, &grad)?;
                    let mut flat = g.d_gamma;
                    flat.extend_from_slice(&g.d_beta);
                    per_layer[i] = flat;
                    g.d_input
                }
                (Layer::Activation(a), LayerCache::Activation { input }) => {
                    a.backward(input, &grad)
                }
                _ => unreachable!("cache kind mismatch"),
            };
        }
        Ok((grad, per_layer.concat()))
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::Dense(d) => d.param_count(),
                Layer::BatchNorm(bn) => bn.param_count(),
                Layer::Activation(_) => 0,
            })
            .sum()
    }

    /// Trainable parameters flattened layer by layer: dense weights
    /// row-major then bias; batch-norm gamma then beta. Running statistics
    /// are not trainable and are excluded.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            match layer {
                Layer::Dense(d) => {
                    out.extend_from_slice(d.weights.as_slice());
                    out.extend_from_slice(&d.bias);
                }
                Layer::BatchNorm(bn) => {
                    out.extend_from_slice(&bn.gamma);
                    out.extend_from_slice(&bn.beta);
                }
                Layer::Activation(_) => {}
            }
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::shape(
                format!("{} parameters", self.param_count()),
                format!("{}", params.len()),
            ));
        }
        let mut i = 0;
        for layer in &mut self.layers {
            match layer {
                Layer::Dense(d) => {
                    let nw = d.in_dim * d.out_dim;
                    d.weights
                        .as_mut_slice()
                        .copy_from_slice(&params[i..i + nw]);
                    i += nw;
                    d.bias.copy_from_slice(&params[i..i + d.out_dim]);
                    i += d.out_dim;
                }
                Layer::BatchNorm(bn) => {
                    bn.gamma.copy_from_slice(&params[i..i + bn.dim]);
                    i += bn.dim;
                    bn.beta.copy_from_slice(&params[i..i + bn.dim]);
                    i += bn.dim;
                }
                Layer::Activation(_) => {}
            }
        }
        Ok(())
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::Dense(d) => LayerSpec::Dense {
                    in_dim: d.in_dim,
                    out_dim: d.out_dim,
                },
                Layer::BatchNorm(bn) => LayerSpec::BatchNorm { dim: bn.dim },
                Layer::Activation(a) => LayerSpec::Activation { activation: *a },
            })
            .collect()
    }

    /// Rebuild a model skeleton (zeroed parameters) from layer specs; the
    /// caller fills in parameters afterwards.
    pub fn from_specs(specs: &[LayerSpec]) -> Self {
        let layers = specs
            .iter()
            .map(|s| match s {
                LayerSpec::Dense { in_dim, out_dim } => Layer::Dense(DenseLayer::from_parts(
                    Matrix::zeros(*in_dim, *out_dim),
                    vec![0.0; *out_dim],
                )),
                LayerSpec::BatchNorm { dim } => Layer::BatchNorm(BatchNorm1D::new(*dim)),
                LayerSpec::Activation { activation } => Layer::Activation(*activation),
            })
            .collect();
        MlpModel { layers }
    }

    /// Non-trainable state (batch-norm running stats) flattened, for
    /// persistence alongside the trainable parameters.
    pub fn running_stats_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            if let Layer::BatchNorm(bn) = layer {
                out.extend_from_slice(&bn.running_mean);
                out.extend_from_slice(&bn.running_var);
            }
        }
        out
    }

    pub fn set_running_stats_flat(&mut self, stats: &[f64]) -> Result<()> {
        let expected: usize = self
            .layers
            .iter()
            .map(|l| match l {
                Layer::BatchNorm(bn) => 2 * bn.dim,
                _ => 0,
            })
            .sum();
        if stats.len() != expected {
            return Err(Error::shape(
                format!("{expected} running-stat values"),
                format!("{}", stats.len()),
            ));
        }
        let mut i = 0;
        for layer in &mut self.layers {
            if let Layer::BatchNorm(bn) = layer {
                bn.running_mean.copy_from_slice(&stats[i..i + bn.dim]);
                i += bn.dim;
                bn.running_var.copy_from_slice(&stats[i..i + bn.dim]);
                i += bn.dim;
            }
        }
        Ok(())
    }
}
