//! Element-wise activations.

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Activation {
    ReLU,
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn forward(&self, input: &Matrix) -> Matrix {
        match self {
            Activation::ReLU => input.map(|x| if x > 0.0 { x } else { 0.0 }),
            Activation::Tanh => input.map(f64::tanh),
            Activation::Sigmoid => input.map(sigmoid),
            Activation::Identity => input.clone(),
        }
    }

    /// d(loss)/d(input) given the layer input and the upstream gradient.
    pub fn backward(&self, input: &Matrix, upstream: &Matrix) -> Matrix {
        let mut out = upstream.clone();
        let n = input.as_slice().len();
        for i in 0..n {
            let x = input.as_slice()[i];
            let d = match self {
                Activation::ReLU => {
                    if x > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Activation::Tanh => {
                    let t = x.tanh();
                    1.0 - t * t
                }
                Activation::Sigmoid => {
                    let s = sigmoid(x);
                    s * (1.0 - s)
                }
                Activation::Identity => 1.0,
            };
            out.as_mut_slice()[i] *= d;
        }
        out
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
