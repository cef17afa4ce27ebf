//! k-nearest-neighbors regressor, the dependency-free reference learner.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::learn::{Learner, Model};
use crate::math;
use crate::{Error, Result};

/// Averages the targets of the `k` training rows nearest to the query,
/// optionally weighted by inverse distance. Neighbor ties break toward the
/// earlier training row.
#[derive(Debug, Clone)]
pub struct KnnLearner {
    pub k: usize,
    pub weighted: bool,
}

impl Default for KnnLearner {
    fn default() -> Self {
        Self {
            k: 10,
            weighted: false,
        }
    }
}

impl Learner for KnnLearner {
    fn name(&self) -> &str {
        "knn"
    }

    fn fit(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<Box<dyn Model>> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = xs[0].len();
        let mut data = Vec::with_capacity(xs.len() * dim);
        for row in xs {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Box::new(KnnModel {
            k: self.k.max(1),
            weighted: self.weighted,
            dim,
            data,
            targets: ys.to_vec(),
        }))
    }
}

struct KnnModel {
    k: usize,
    weighted: bool,
    dim: usize,
    /// Row-major training inputs.
    data: Vec<f64>,
    targets: Vec<f64>,
}

impl Model for KnnModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let n = self.targets.len();
        let k = self.k.min(n);
        // Running top-k of (squared distance, index), kept sorted; ties
        // resolve toward lower indices because rows are scanned in order.
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for i in 0..n {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let d2: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.len() == k && d2 >= best[k - 1].0 {
                continue;
            }
            let at = best.partition_point(|(d, _)| *d <= d2);
            best.insert(at, (d2, i));
            best.truncate(k);
        }
        if self.weighted {
            let mut num = 0.0;
            let mut den = 0.0;
            for &(d2, i) in &best {
                let w = 1.0 / (math::sqrt(d2) + 1e-12);
                num += w * self.targets[i];
                den += w;
            }
            Ok(num / den)
        } else {
            Ok(best.iter().map(|&(_, i)| self.targets[i]).sum::<f64>() / best.len() as f64)
        }
    }
}
