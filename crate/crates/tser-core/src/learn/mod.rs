//! Pluggable regression learners, the direct multi-horizon wrapper, and the
//! training regimes that decide which rows a forecaster sees.

mod gbdt;
mod knn;
mod ridge;

pub use gbdt::GbdtLearner;
pub use knn::KnnLearner;
pub use ridge::RidgeLearner;

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embed::EmbeddedDataset;
use crate::resample::{augment, label, oversample_majority, ResamplePlan};
use crate::{Error, Result};

/// A fitted single-output regression model.
pub trait Model: Send + Sync {
    fn predict(&self, x: &[f64]) -> Result<f64>;
}

/// A regression learner: fits `(x, y)` rows into a [`Model`].
///
/// Learners must be deterministic: two fits on the same rows produce
/// identical predictions.
pub trait Learner: Send + Sync {
    fn name(&self) -> &str;
    fn fit(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<Box<dyn Model>>;
}

/// Direct multi-step forecaster: one independently fitted learner per
/// horizon step.
pub struct DirectForecaster {
    step_models: Vec<Box<dyn Model>>,
    q: usize,
    h: usize,
}

impl DirectForecaster {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Forecasts `h` steps from the last `q` observations.
    pub fn forecast(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.q {
            return Err(Error::DimensionMismatch {
                expected: self.q,
                got: x.len(),
            });
        }
        self.step_models.iter().map(|m| m.predict(x)).collect()
    }
}

/// Fits one learner per target column of the dataset.
pub fn fit_direct(dataset: &EmbeddedDataset, learner: &dyn Learner) -> Result<DirectForecaster> {
    if dataset.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let xs: Vec<Vec<f64>> = dataset.samples().iter().map(|s| s.x.clone()).collect();
    let step_models = (0..dataset.h())
        .map(|step| {
            let ys: Vec<f64> = dataset.samples().iter().map(|s| s.y[step]).collect();
            learner.fit(&xs, &ys)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectForecaster {
        step_models,
        q: dataset.q(),
        h: dataset.h(),
    })
}

/// Which rows a forecaster is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Rows of the target series only.
    Local,
    /// All rows, untouched.
    Global,
    /// All rows, resampled towards the target series.
    Tser,
    /// As [`Regime::Tser`], then rows of other series are discarded.
    TserLocal,
    /// As [`Regime::Tser`], then the majority class is itself oversampled by
    /// half its original size.
    TserAll,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Local => "local",
            Regime::Global => "global",
            Regime::Tser => "tser",
            Regime::TserLocal => "tser_local",
            Regime::TserAll => "tser_all",
        }
    }

    pub fn needs_plan(&self) -> bool {
        matches!(self, Regime::Tser | Regime::TserLocal | Regime::TserAll)
    }
}

impl core::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(Regime::Local),
            "global" => Ok(Regime::Global),
            "tser" => Ok(Regime::Tser),
            "tser_local" | "tser-local" => Ok(Regime::TserLocal),
            "tser_all" | "tser-all" => Ok(Regime::TserAll),
            _ => Err(Error::PlanMismatch {
                reason: "unknown regime name",
            }),
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Builds the training set one regime sees for one target series.
///
/// Row-count identities, with `n_min` target rows, `n_maj` other rows and
/// plan ratio `rho`:
///
/// * `Local`: `n_min`
/// * `Global`: `n_min + n_maj`
/// * `Tser` (oversampler): `n_maj + max(n_min, ceil(rho * n_maj))`
/// * `TserLocal` (oversampler): `max(n_min, ceil(rho * n_maj))`
/// * `TserAll`: `Tser` plus `ceil(n_maj / 2)` synthetic majority rows
pub fn assemble_training_set(
    train: &EmbeddedDataset,
    regime: Regime,
    target_id: &str,
    plan: Option<&ResamplePlan>,
) -> Result<EmbeddedDataset> {
    if regime.needs_plan() != plan.is_some() {
        return Err(Error::PlanMismatch {
            reason: if plan.is_some() {
                "local and global regimes carry no resample plan"
            } else {
                "TSER regimes require a resample plan"
            },
        });
    }
    match regime {
        Regime::Local => {
            let local = train.filtered(|s| s.origin_id == target_id);
            if local.is_empty() {
                return Err(Error::UnknownTarget {
                    id: target_id.into(),
                });
            }
            Ok(local)
        }
        Regime::Global => Ok(train.clone()),
        Regime::Tser => {
            let labeled = label(train, target_id)?;
            Ok(augment(&labeled, plan.expect("checked above"))?.dataset)
        }
        Regime::TserLocal => {
            let labeled = label(train, target_id)?;
            let augmented = augment(&labeled, plan.expect("checked above"))?.dataset;
            Ok(augmented.filtered(|s| s.origin_id == target_id))
        }
        Regime::TserAll => {
            let plan = plan.expect("checked above");
            if !plan.method.is_oversampler() {
                return Err(Error::PlanMismatch {
                    reason: "the tser_all regime requires an oversampling method",
                });
            }
            let labeled = label(train, target_id)?;
            let n_maj = labeled.majority_indices().len();
            let mut dataset = augment(&labeled, plan)?.dataset;
            let extra = n_maj.div_ceil(2);
            if extra > 0 {
                let grown = oversample_majority(
                    &labeled,
                    plan,
                    extra,
                    crate::seed::stage_seed(plan.seed, "majority-pass"),
                )?;
                dataset.extend(grown.synthetic)?;
            }
            Ok(dataset)
        }
    }
}

/// Reorders rows with a seeded shuffle, so learner order-sensitivity cannot
/// masquerade as a regime effect.
pub fn shuffle_rows(dataset: &EmbeddedDataset, seed: u64) -> EmbeddedDataset {
    let mut samples = dataset.samples().to_vec();
    samples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    EmbeddedDataset::from_samples(dataset.q(), dataset.h(), samples)
        .expect("reordered rows keep their shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EmbeddedSample;
    use crate::resample::ResampleMethod;

    struct ConstantLearner(f64);

    impl Learner for ConstantLearner {
        fn name(&self) -> &str {
            "constant"
        }

        fn fit(&self, _xs: &[Vec<f64>], _ys: &[f64]) -> Result<Box<dyn Model>> {
            Ok(Box::new(ConstantModel(self.0)))
        }
    }

    struct ConstantModel(f64);

    impl Model for ConstantModel {
        fn predict(&self, _x: &[f64]) -> Result<f64> {
            Ok(self.0)
        }
    }

    fn toy_train(n_target: usize, n_other: usize) -> EmbeddedDataset {
        let mut samples = Vec::new();
        for i in 0..n_target {
            samples.push(EmbeddedSample {
                x: vec![i as f64, i as f64 + 1.0],
                y: vec![i as f64 + 2.0, i as f64 + 3.0],
                origin_id: "T".into(),
                origin_time: Some(i + 2),
                synthetic: false,
            });
        }
        for i in 0..n_other {
            samples.push(EmbeddedSample {
                x: vec![100.0 + i as f64, 101.0 + i as f64],
                y: vec![102.0 + i as f64, 103.0 + i as f64],
                origin_id: "O".into(),
                origin_time: Some(i + 2),
                synthetic: false,
            });
        }
        EmbeddedDataset::from_samples(2, 2, samples).unwrap()
    }

    #[test]
    fn forecast_concatenates_step_models() {
        let forecaster = DirectForecaster {
            step_models: vec![Box::new(ConstantModel(1.5)), Box::new(ConstantModel(-2.0))],
            q: 2,
            h: 2,
        };
        assert_eq!(forecaster.forecast(&[0.0, 0.0]).unwrap(), vec![1.5, -2.0]);
    }

    #[test]
    fn forecast_rejects_wrong_dimension() {
        let forecaster = DirectForecaster {
            step_models: vec![Box::new(ConstantModel(0.0))],
            q: 3,
            h: 1,
        };
        assert!(matches!(
            forecaster.forecast(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 1
            })
        ));
    }

    #[test]
    fn fit_direct_rejects_empty_dataset() {
        let empty = EmbeddedDataset::new(2, 1).unwrap();
        assert!(matches!(
            fit_direct(&empty, &ConstantLearner(0.0)),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn fit_direct_single_horizon() {
        let train = toy_train(3, 0).filtered(|_| true);
        let forecaster = fit_direct(&train, &ConstantLearner(4.0)).unwrap();
        assert_eq!(forecaster.h(), 2);
        assert_eq!(forecaster.forecast(&[9.0, 9.0]).unwrap(), vec![4.0, 4.0]);
    }

    fn plan(method: ResampleMethod, ratio: f64) -> ResamplePlan {
        ResamplePlan::new(method, 3, ratio, 17, "T").unwrap()
    }

    #[test]
    fn regime_row_counts() {
        let train = toy_train(100, 900);
        let smote = plan(ResampleMethod::Smote, 1.0);
        assert_eq!(
            assemble_training_set(&train, Regime::Local, "T", None)
                .unwrap()
                .len(),
            100
        );
        assert_eq!(
            assemble_training_set(&train, Regime::Global, "T", None)
                .unwrap()
                .len(),
            1000
        );
        assert_eq!(
            assemble_training_set(&train, Regime::Tser, "T", Some(&smote))
                .unwrap()
                .len(),
            1800
        );
        let local_aug =
            assemble_training_set(&train, Regime::TserLocal, "T", Some(&smote)).unwrap();
        assert_eq!(local_aug.len(), 900);
        assert!(local_aug.samples().iter().all(|s| s.origin_id == "T"));
        assert_eq!(
            assemble_training_set(&train, Regime::TserAll, "T", Some(&smote))
                .unwrap()
                .len(),
            2250
        );
    }

    #[test]
    fn regime_plan_invariants() {
        let train = toy_train(5, 5);
        let smote = plan(ResampleMethod::Smote, 1.0);
        assert!(assemble_training_set(&train, Regime::Global, "T", Some(&smote)).is_err());
        assert!(assemble_training_set(&train, Regime::Tser, "T", None).is_err());
        let nm = plan(ResampleMethod::NearMiss, 1.0);
        assert!(assemble_training_set(&train, Regime::TserAll, "T", Some(&nm)).is_err());
    }

    #[test]
    fn shuffle_is_seeded_and_preserves_rows() {
        let train = toy_train(20, 0);
        let a = shuffle_rows(&train, 5);
        let b = shuffle_rows(&train, 5);
        let c = shuffle_rows(&train, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let mut times: Vec<usize> = a.samples().iter().map(|s| s.origin_time.unwrap()).collect();
        times.sort_unstable();
        assert_eq!(times, (2..22).collect::<Vec<_>>());
    }
}
