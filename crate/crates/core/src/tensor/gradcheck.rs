use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A scalar function of a list of parameter matrices with an analytic
/// gradient. Must be deterministic: no dropout, fixed seeds.
pub trait Objective {
    fn loss(&mut self, params: &[Matrix]) -> Result<f64>;
    fn gradient(&mut self, params: &[Matrix]) -> Result<Vec<Matrix>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// `(parameter index, flat entry index)` of the worst coordinate.
    pub worst: (usize, usize),
    pub coords_checked: usize,
}

/// `|a - n| / max(1e-8, |a| + |n|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-8)
}

/// Compares analytic gradients against central differences with the given
/// `step`. With `max_coords_per_param = Some(k)`, at most `k` entries of each
/// parameter are sampled (seeded by `seed`); otherwise every entry is checked.
pub fn finite_diff_check(
    objective: &mut impl Objective,
    params: &[Matrix],
    step: f64,
    max_coords_per_param: Option<usize>,
    seed: u64,
) -> Result<GradCheckReport> {
    let analytic = objective.gradient(params)?;
    if analytic.len() != params.len() {
        return Err(Error::shape(
            "finite_diff_check",
            format!("{} gradients for {} params", analytic.len(), params.len()),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = params.to_vec();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: (0, 0),
        coords_checked: 0,
    };
    for (pi, grad) in analytic.iter().enumerate() {
        let len = params[pi].len();
        let coords: Vec<usize> = match max_coords_per_param {
            Some(k) if k < len => sample(&mut rng, len, k).into_vec(),
            _ => (0..len).collect(),
        };
        for j in coords {
            let original = params[pi].data()[j];
            work[pi].data_mut()[j] = original + step;
            let plus = objective.loss(&work)?;
            work[pi].data_mut()[j] = original - step;
            let minus = objective.loss(&work)?;
            work[pi].data_mut()[j] = original;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFinite(format!(
                    "loss while perturbing param {pi} entry {j}"
                )));
            }
            let numeric = (plus - minus) / (2.0 * step);
            let err = relative_error(grad.data()[j], numeric);
            report.coords_checked += 1;
            if err > report.max_rel_error {
                report.max_rel_error = err;
                report.worst = (pi, j);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `sum_i c_i * x_i^2` over every entry of every parameter.
    struct Quadratic;

    impl Objective for Quadratic {
        fn loss(&mut self, params: &[Matrix]) -> Result<f64> {
            Ok(params
                .iter()
                .flat_map(|p| p.data().iter().enumerate())
                .map(|(i, x)| (i as f64 + 1.0) * x * x)
                .sum())
        }

        fn gradient(&mut self, params: &[Matrix]) -> Result<Vec<Matrix>> {
            Ok(params
                .iter()
                .map(|p| {
                    let data = p
                        .data()
                        .iter()
                        .enumerate()
                        .map(|(i, x)| 2.0 * (i as f64 + 1.0) * x)
                        .collect();
                    Matrix::new(p.rows(), p.cols(), data).unwrap()
                })
                .collect())
        }
    }

    #[test]
    fn quadratic_is_exact() {
        let params = vec![
            Matrix::from_rows(&[vec![0.3, -1.2], vec![2.0, 0.7]]).unwrap(),
            Matrix::scalar(-0.4),
        ];
        let r = finite_diff_check(&mut Quadratic, &params, 1e-5, None, 0).unwrap();
        assert_eq!(r.coords_checked, 5);
        assert!(r.max_rel_error < 1e-7, "{r:?}");
    }

    struct Broken;

    impl Objective for Broken {
        fn loss(&mut self, params: &[Matrix]) -> Result<f64> {
            Ok(params[0].data()[0].powi(2))
        }
        fn gradient(&mut self, params: &[Matrix]) -> Result<Vec<Matrix>> {
            // wrong by a factor of two
            Ok(vec![Matrix::scalar(params[0].data()[0])])
        }
    }

    #[test]
    fn detects_wrong_gradient() {
        let r = finite_diff_check(&mut Broken, &[Matrix::scalar(1.0)], 1e-5, None, 0).unwrap();
        assert!(r.max_rel_error > 0.3);
    }

    struct Exploding;

    impl Objective for Exploding {
        fn loss(&mut self, params: &[Matrix]) -> Result<f64> {
            Ok(1.0 / (params[0].data()[0] - 1e-5))
        }
        fn gradient(&mut self, _: &[Matrix]) -> Result<Vec<Matrix>> {
            Ok(vec![Matrix::scalar(0.0)])
        }
    }

    #[test]
    fn non_finite_loss_is_an_error() {
        let r = finite_diff_check(&mut Exploding, &[Matrix::scalar(0.0)], 1e-5, None, 0);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn sampling_limits_coordinates() {
        let params = vec![Matrix::filled(10, 10, 0.5)];
        let r = finite_diff_check(&mut Quadratic, &params, 1e-5, Some(7), 3).unwrap();
        assert_eq!(r.coords_checked, 7);
    }
}
