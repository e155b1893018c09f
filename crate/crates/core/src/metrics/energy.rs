//! Energy distance between two multivariate samples.
//!
//! `E = 2 E||X - Y|| - E||X - X'|| - E||Y - Y'||`, estimated over all
//! pairs. Nonnegative; zero iff the distributions coincide. Used as the
//! generated-vs-real similarity diagnostic on toy targets.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn energy_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.cols() != b.cols() {
        return Err(Error::shape(
            format!("samples with {} cols", a.cols()),
            b.shape_str(),
        ));
    }
    if a.rows() == 0 || b.rows() == 0 {
        return Err(Error::Data("energy distance needs non-empty samples".into()));
    }
    let cross = mean_pairwise(a, b, false);
    let within_a = mean_pairwise(a, a, true);
    let within_b = mean_pairwise(b, b, true);
    Ok(2.0 * cross - within_a - within_b)
}

fn mean_pairwise(a: &Matrix, b: &Matrix, same: bool) -> f64 {
    let mut sum = 0.0;
    let mut count = 0u64;
    for i in 0..a.rows() {
        let start = if same { i + 1 } else { 0 };
        for j in start..b.rows() {
            let d: f64 = a
                .row(i)
                .iter()
                .zip(b.row(j))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            sum += d;
            count += 1;
        }
    }
    if same {
        // all ordered pairs including the zero diagonal
        let n = a.rows() as u64;
        2.0 * sum / (n * n) as f64
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::Prng;

    fn sample(rng: &mut Prng, n: usize, shift: f64) -> Matrix {
        Matrix::from_vec(n, 2, (0..2 * n).map(|_| rng.normal() + shift).collect())
    }

    #[test]
    fn identical_samples_are_zero() {
        let mut rng = Prng::new(1);
        let a = sample(&mut rng, 30, 0.0);
        let e = energy_distance(&a, &a).unwrap();
        assert!(e.abs() < 1e-12, "{e}");
    }

    #[test]
    fn separated_samples_exceed_close_ones() {
        let mut rng = Prng::new(2);
        let a = sample(&mut rng, 50, 0.0);
        let near = sample(&mut rng, 50, 0.1);
        let far = sample(&mut rng, 50, 5.0);
        let e_near = energy_distance(&a, &near).unwrap();
        let e_far = energy_distance(&a, &far).unwrap();
        assert!(e_far > e_near, "{e_far} vs {e_near}");
        assert!(e_near >= -1e-12);
    }

    #[test]
    fn symmetric() {
        let mut rng = Prng::new(3);
        let a = sample(&mut rng, 20, 0.0);
        let b = sample(&mut rng, 25, 1.0);
        let ab = energy_distance(&a, &b).unwrap();
        let ba = energy_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
    }
}
