//! Gradient-boosted regression trees behind the same [`Learner`] interface.
//!
//! Squared-error boosting over depth-limited trees with exact greedy splits,
//! fully deterministic (no row or feature subsampling). This is the optional
//! third learner; the k-NN and ridge learners remain the reference pair.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::learn::{Learner, Model};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GbdtLearner {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_child_samples: usize,
    pub lambda_l2: f64,
}

impl Default for GbdtLearner {
    fn default() -> Self {
        Self {
            rounds: 50,
            max_depth: 3,
            learning_rate: 0.1,
            min_child_samples: 7,
            lambda_l2: 1.0,
        }
    }
}

enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

impl Learner for GbdtLearner {
    fn name(&self) -> &str {
        "gbdt"
    }

    fn fit(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<Box<dyn Model>> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = xs[0].len();
        for row in xs {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let bias = ys.iter().sum::<f64>() / ys.len() as f64;
        let mut residuals: Vec<f64> = ys.iter().map(|y| y - bias).collect();
        let mut trees = Vec::with_capacity(self.rounds);
        let indices: Vec<usize> = (0..xs.len()).collect();
        for _ in 0..self.rounds {
            let mut tree = Tree { nodes: Vec::new() };
            self.grow(&mut tree, xs, &residuals, indices.clone(), 0);
            for (i, x) in xs.iter().enumerate() {
                residuals[i] -= self.learning_rate * tree.predict(x);
            }
            trees.push(tree);
        }
        Ok(Box::new(GbdtModel {
            bias,
            learning_rate: self.learning_rate,
            trees,
            dim,
        }))
    }
}

impl GbdtLearner {
    fn leaf_value(&self, residuals: &[f64], rows: &[usize]) -> f64 {
        let sum: f64 = rows.iter().map(|&i| residuals[i]).sum();
        sum / (rows.len() as f64 + self.lambda_l2)
    }

    fn grow(
        &self,
        tree: &mut Tree,
        xs: &[Vec<f64>],
        residuals: &[f64],
        rows: Vec<usize>,
        depth: usize,
    ) -> usize {
        let id = tree.nodes.len();
        tree.nodes.push(Node::Leaf {
            value: self.leaf_value(residuals, &rows),
        });
        if depth >= self.max_depth || rows.len() < 2 * self.min_child_samples.max(1) {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(xs, residuals, &rows) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&i| xs[i][feature] <= threshold);
        let left = self.grow(tree, xs, residuals, left_rows, depth + 1);
        let right = self.grow(tree, xs, residuals, right_rows, depth + 1);
        tree.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Exact greedy search maximizing the squared-sum gain
    /// `SL^2/(nL+l2) + SR^2/(nR+l2) - S^2/(n+l2)`; first best wins, so the
    /// result does not depend on float tie noise.
    fn best_split(
        &self,
        xs: &[Vec<f64>],
        residuals: &[f64],
        rows: &[usize],
    ) -> Option<(usize, f64)> {
        let min_child = self.min_child_samples.max(1);
        let total: f64 = rows.iter().map(|&i| residuals[i]).sum();
        let parent_score = total * total / (rows.len() as f64 + self.lambda_l2);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<usize> = rows.to_vec();
        #[allow(clippy::needless_range_loop)]
        for feature in 0..xs[0].len() {
            order.sort_unstable_by(|&a, &b| {
                xs[a][feature].total_cmp(&xs[b][feature]).then(a.cmp(&b))
            });
            let mut left_sum = 0.0;
            for (count, window) in order.windows(2).enumerate() {
                left_sum += residuals[window[0]];
                let n_left = count + 1;
                let value = xs[window[0]][feature];
                let next = xs[window[1]][feature];
                if value == next || n_left < min_child || order.len() - n_left < min_child {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / (n_left as f64 + self.lambda_l2)
                    + right_sum * right_sum / ((order.len() - n_left) as f64 + self.lambda_l2)
                    - parent_score;
                if best.map_or(gain > 1e-12, |(g, _, _)| gain > g) {
                    best = Some((gain, feature, (value + next) / 2.0));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}

struct GbdtModel {
    bias: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
    dim: usize,
}

impl Model for GbdtModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let boost: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        Ok(self.bias + self.learning_rate * boost)
    }
}
