//! Gradient verification across every layer type and the composed
//! networks used by the GAN and the classifiers, against central finite
//! differences.

use scf_ganlab_core::nn::{finite_difference_check, half_sq_norm, Activation, MlpModel};
use scf_ganlab_core::{Matrix, Prng};

const STEP: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn random_input(rows: usize, cols: usize, rng: &mut Prng, offset: f64) -> Matrix {
    Matrix::from_vec(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.normal() * 0.5 + offset).collect(),
    )
}

fn check(model: &mut MlpModel, input: &Matrix, label: &str) {
    let rel = finite_difference_check(model, input, &half_sq_norm, STEP).unwrap();
    assert!(rel < TOL, "{label}: rel error {rel}");
}

#[test]
fn gradient_suite_hundred_trials() {
    let smooth = [Activation::Tanh, Activation::Sigmoid, Activation::Identity];
    for trial in 0..100u64 {
        let mut rng = Prng::new(1000 + trial);
        let case = trial % 5;
        match case {
            // single dense layer with a smooth activation
            0 => {
                let act = smooth[(trial / 5) as usize % smooth.len()];
                let mut model = MlpModel::feedforward(&[4, 3], &[act], false, &mut rng);
                let input = random_input(6, 4, &mut rng, 0.0);
                check(&mut model, &input, &format!("dense+{act:?} trial {trial}"));
            }
            // dense + relu; inputs shifted away from the kink
            1 => {
                let mut model = MlpModel::feedforward(
                    &[4, 5, 2],
                    &[Activation::ReLU, Activation::Identity],
                    false,
                    &mut rng,
                );
                let input = random_input(6, 4, &mut rng, 3.0);
                check(&mut model, &input, &format!("relu mlp trial {trial}"));
            }
            // batchnorm inside a deeper stack
            2 => {
                let mut model = MlpModel::feedforward(
                    &[3, 6, 4],
                    &[Activation::Tanh, Activation::Sigmoid],
                    true,
                    &mut rng,
                );
                let input = random_input(8, 3, &mut rng, 0.0);
                check(&mut model, &input, &format!("batchnorm mlp trial {trial}"));
            }
            // generator shape: noise in, tanh out, batchnorm hidden
            3 => {
                let mut model = MlpModel::feedforward(
                    &[5, 8, 4],
                    &[Activation::Tanh, Activation::Tanh],
                    true,
                    &mut rng,
                );
                let input = random_input(8, 5, &mut rng, 0.0);
                check(&mut model, &input, &format!("generator trial {trial}"));
            }
            // critic / classifier shape: features in, scalar out
            _ => {
                let mut model = MlpModel::feedforward(
                    &[6, 4, 1],
                    &[Activation::Sigmoid, Activation::Identity],
                    false,
                    &mut rng,
                );
                let input = random_input(8, 6, &mut rng, 0.0);
                check(&mut model, &input, &format!("critic trial {trial}"));
            }
        }
    }
}

#[test]
fn gradient_check_is_deterministic() {
    let run = || {
        let mut rng = Prng::new(7);
        let mut model =
            MlpModel::feedforward(&[4, 4, 2], &[Activation::Tanh, Activation::Sigmoid], true, &mut rng);
        let input = random_input(6, 4, &mut rng, 0.0);
        finite_difference_check(&mut model, &input, &half_sq_norm, STEP).unwrap()
    };
    assert_eq!(run().to_bits(), run().to_bits());
}
