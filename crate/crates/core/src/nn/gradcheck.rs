//! Finite-difference gradient checker for MLP parameter gradients.
//!
//! Perturbs each trainable parameter by `±step`, evaluates the loss, and
//! compares the central difference against the analytic gradient from
//! `MlpModel::backward`.

use crate::error::Result;
use crate::matrix::Matrix;

use super::model::MlpModel;

/// A differentiable scalar loss over the model output: returns the loss
/// value and its gradient with respect to the output.
pub trait LossFn {
    fn eval(&self, output: &Matrix) -> (f64, Matrix);
}

impl<F> LossFn for F
where
    F: Fn(&Matrix) -> (f64, Matrix),
{
    fn eval(&self, output: &Matrix) -> (f64, Matrix) {
        self(output)
    }
}

/// Max over parameters of `|analytic - central difference| / max(1, |analytic|)`.
pub fn finite_difference_check(
    model: &mut MlpModel,
    input: &Matrix,
    loss: &dyn LossFn,
    step: f64,
) -> Result<f64> {
    assert!(step > 0.0, "step must be positive");
    let (output, caches) = model.forward_cached(input)?;
    let (_, d_output) = loss.eval(&output);
    let (_, analytic) = model.backward(&caches, &d_output)?;

    let params = model.params_flat();
    let mut max_rel = 0.0_f64;
    let mut probe = params.clone();
    for i in 0..params.len() {
        probe[i] = params[i] + step;
        model.set_params_flat(&probe)?;
        let (up, _) = loss.eval(&model.forward(input)?);
        probe[i] = params[i] - step;
        model.set_params_flat(&probe)?;
        let (down, _) = loss.eval(&model.forward(input)?);
        probe[i] = params[i];

        let fd = (up - down) / (2.0 * step);
        let rel = (analytic[i] - fd).abs() / analytic[i].abs().max(1.0);
        if rel > max_rel {
            max_rel = rel;
        }
    }
    model.set_params_flat(&params)?;
    Ok(max_rel)
}

/// Sum-of-squares loss `0.5 * ||output||^2`; its output gradient is the
/// output itself. The standard probe loss for gradient checks.
pub fn half_sq_norm(output: &Matrix) -> (f64, Matrix) {
    let l = 0.5 * output.as_slice().iter().map(|x| x * x).sum::<f64>();
    (l, output.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::activation::Activation;
    use crate::nn::dense::DenseLayer;
    use crate::nn::model::{Layer, MlpModel};
    use crate::prng::Prng;

    #[test]
    fn quadratic_loss_is_near_exact() {
        // 0.5*||Wx||^2 is polynomial in W, so central differences are
        // exact up to rounding.
        let mut rng = Prng::new(21);
        let mut model = MlpModel::new(vec![Layer::Dense(DenseLayer::glorot(3, 2, &mut rng))]);
        let input = Matrix::from_vec(2, 3, (0..6).map(|_| rng.normal()).collect());
        let err = finite_difference_check(&mut model, &input, &half_sq_norm, 1e-4).unwrap();
        assert!(err < 1e-8, "max rel err {err}");
    }

    #[test]
    fn relu_mlp_two_step_sizes_agree() {
        let mut rng = Prng::new(22);
        let mut model = MlpModel::feedforward(
            &[4, 8, 3],
            &[Activation::ReLU, Activation::Identity],
            false,
            &mut rng,
        );
        // keep inputs away from ReLU kinks
        let input = Matrix::from_vec(3, 4, (0..12).map(|_| rng.normal() + 3.0).collect());
        let e1 = finite_difference_check(&mut model, &input, &half_sq_norm, 1e-4).unwrap();
        let e2 = finite_difference_check(&mut model, &input, &half_sq_norm, 1e-6).unwrap();
        assert!(e1 < 1e-5, "step 1e-4: {e1}");
        assert!(e2 < 1e-5, "step 1e-6: {e2}");
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let mut rng = Prng::new(23);
        let mut model = MlpModel::new(vec![Layer::Dense(DenseLayer::glorot(3, 2, &mut rng))]);
        // sizable parameters and inputs so the corrupted slot has |grad| > 1
        model
            .set_params_flat(&vec![0.5; model.param_count()])
            .unwrap();
        let input = Matrix::from_vec(2, 3, (0..6).map(|_| rng.normal() + 2.0).collect());

        let (output, caches) = model.forward_cached(&input).unwrap();
        let (_, d_output) = half_sq_norm(&output);
        let (_, mut analytic) = model.backward(&caches, &d_output).unwrap();
        analytic[0] *= 2.0; // inject fault on one weight

        let params = model.params_flat();
        let step = 1e-5;
        let mut probe = params.clone();
        let mut max_rel = 0.0_f64;
        for i in 0..params.len() {
            probe[i] = params[i] + step;
            model.set_params_flat(&probe).unwrap();
            let (up, _) = half_sq_norm(&model.forward(&input).unwrap());
            probe[i] = params[i] - step;
            model.set_params_flat(&probe).unwrap();
            let (down, _) = half_sq_norm(&model.forward(&input).unwrap());
            probe[i] = params[i];
            let fd = (up - down) / (2.0 * step);
            let rel = (analytic[i] - fd).abs() / analytic[i].abs().max(1.0);
            max_rel = max_rel.max(rel);
        }
        assert!(max_rel > 0.4, "fault not detected: {max_rel}");
    }
}
