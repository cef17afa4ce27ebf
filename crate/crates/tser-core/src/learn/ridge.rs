//! Closed-form ridge regression, the linear reference learner.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::learn::{Learner, Model};
use crate::{Error, Result};

/// Floor added to the penalty so the normal equations stay solvable even at
/// `lambda = 0` on degenerate designs.
const LAMBDA_FLOOR: f64 = 1e-12;

/// Solves the normal equations `(X'X + lambda I) w = X'y` directly. The
/// intercept column is not penalized.
#[derive(Debug, Clone)]
pub struct RidgeLearner {
    pub lambda: f64,
}

impl Default for RidgeLearner {
    fn default() -> Self {
        Self { lambda: 1e-3 }
    }
}

impl Learner for RidgeLearner {
    fn name(&self) -> &str {
        "ridge"
    }

    fn fit(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<Box<dyn Model>> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = xs[0].len();
        // Gram matrix of the design [X | 1], row-major (dim + 1)^2.
        let d = dim + 1;
        let mut gram = vec![0.0; d * d];
        let mut moment = vec![0.0; d];
        for (row, &target) in xs.iter().zip(ys) {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for i in 0..dim {
                for j in i..dim {
                    gram[i * d + j] += row[i] * row[j];
                }
                gram[i * d + dim] += row[i];
                moment[i] += row[i] * target;
            }
            gram[dim * d + dim] += 1.0;
            moment[dim] += target;
        }
        for i in 0..d {
            for j in 0..i {
                gram[i * d + j] = gram[j * d + i];
            }
        }
        let penalty = self.lambda.max(LAMBDA_FLOOR);
        for i in 0..dim {
            gram[i * d + i] += penalty;
        }
        let solution = solve(gram, moment, d)?;
        let (coefficients, intercept) = {
            let mut c = solution;
            let b = c.pop().expect("system has dim + 1 unknowns");
            (c, b)
        };
        Ok(Box::new(RidgeModel {
            coefficients,
            intercept,
        }))
    }
}

/// Gaussian elimination with partial pivoting on a row-major square system.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                crate::math::abs(a[r * n + col]).total_cmp(&crate::math::abs(a[s * n + col]))
            })
            .expect("non-empty range");
        if crate::math::abs(a[pivot_row * n + col]) == 0.0 {
            // Ridge floor makes this unreachable for finite inputs; guard anyway.
            return Err(Error::EmptyTrainingSet);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

struct RidgeModel {
    coefficients: Vec<f64>,
    intercept: f64,
}

impl Model for RidgeModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                got: x.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + self.intercept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_planted_coefficients() {
        // y = 2 x1 - 3 x2 + 5, noiseless.
        let xs: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i % 7) as f64, ((i * 3) % 5) as f64])
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0] - 3.0 * x[1] + 5.0).collect();
        let model = RidgeLearner { lambda: 0.0 }.fit(&xs, &ys).unwrap();
        for x in &xs {
            let expected = 2.0 * x[0] - 3.0 * x[1] + 5.0;
            assert!((model.predict(x).unwrap() - expected).abs() < 1e-6);
        }
        // Extrapolation: 2*10 - 3*10 + 5.
        assert!((model.predict(&[10.0, 10.0]).unwrap() + 5.0).abs() < 1e-6);
    }

    #[test]
    fn single_row_does_not_fail() {
        let model = RidgeLearner { lambda: 0.0 }
            .fit(&[vec![1.0, 2.0]], &[3.0])
            .unwrap();
        assert!(model.predict(&[1.0, 2.0]).unwrap().is_finite());
    }

    #[test]
    fn heavy_penalty_shrinks_towards_mean() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x[0]).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let model = RidgeLearner { lambda: 1e9 }.fit(&xs, &ys).unwrap();
        let at_mean_x = model.predict(&[9.5]).unwrap();
        assert!((at_mean_x - mean).abs() < 1.0, "{at_mean_x} vs {mean}");
    }

    #[test]
    fn refit_is_deterministic() {
        let xs: Vec<Vec<f64>> = (0..15)
            .map(|i| vec![(i as f64).sin(), (i as f64).cos()])
            .collect();
        let ys: Vec<f64> = (0..15).map(|i| (i as f64) * 0.3).collect();
        let a = RidgeLearner::default().fit(&xs, &ys).unwrap();
        let b = RidgeLearner::default().fit(&xs, &ys).unwrap();
        for x in &xs {
            assert_eq!(a.predict(x).unwrap(), b.predict(x).unwrap());
        }
    }
}
