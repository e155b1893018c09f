//! Fully connected layer: `output = input · weights + bias` broadcast per row.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::prng::Prng;

#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// in_dim x out_dim, row-major.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub d_input: Matrix,
    pub d_weights: Matrix,
    pub d_bias: Vec<f64>,
}

impl DenseLayer {
    /// Glorot-uniform weights, zero biases.
    pub fn glorot(in_dim: usize, out_dim: usize, rng: &mut Prng) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let data: Vec<f64> = (0..in_dim * out_dim)
            .map(|_| rng.uniform(-limit, limit))
            .collect();
        DenseLayer {
            in_dim,
            out_dim,
            weights: Matrix::from_vec(in_dim, out_dim, data),
            bias: vec![0.0; out_dim],
        }
    }

    pub fn from_parts(weights: Matrix, bias: Vec<f64>) -> Self {
        assert_eq!(weights.cols(), bias.len());
        DenseLayer {
            in_dim: weights.rows(),
            out_dim: weights.cols(),
            weights,
            bias,
        }
    }

    pub fn forward(&self, input: &Matrix) -> Result<Matrix> {
        if input.cols() != self.in_dim {
            return Err(Error::shape(
                format!("input with {} cols", self.in_dim),
                input.shape_str(),
            ));
        }
        let mut out = input.matmul(&self.weights)?;
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                let v = out.get(r, c) + self.bias[c];
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Exact analytic gradients of the affine map.
    pub fn backward(&self, input: &Matrix, upstream: &Matrix) -> Result<DenseGrads> {
        if upstream.rows() != input.rows() || upstream.cols() != self.out_dim {
            return Err(Error::shape(
                format!("upstream {}x{}", input.rows(), self.out_dim),
                upstream.shape_str(),
            ));
        }
        let d_input = upstream.matmul(&self.weights.transpose())?;
        let d_weights = input.transpose().matmul(upstream)?;
        let mut d_bias = vec![0.0; self.out_dim];
        for r in 0..upstream.rows() {
            for c in 0..self.out_dim {
                d_bias[c] += upstream.get(r, c);
            }
        }
        Ok(DenseGrads {
            d_input,
            d_weights,
            d_bias,
        })
    }

    pub fn param_count(&self) -> usize {
        self.in_dim * self.out_dim + self.out_dim
    }
}

/// Forward pass, plus gradients when an upstream gradient is supplied.
pub fn dense_forward_backward(
    layer: &DenseLayer,
    input: &Matrix,
    upstream_grad: Option<&Matrix>,
) -> Result<(Matrix, Option<DenseGrads>)> {
    let output = layer.forward(input)?;
    let grads = match upstream_grad {
        Some(g) => Some(layer.backward(input, g)?),
        None => None,
    };
    Ok((output, grads))
}
