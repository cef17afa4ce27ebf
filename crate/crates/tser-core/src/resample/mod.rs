//! Entity labeling and resampling of embedded datasets.
//!
//! Rows whose origin is the series of interest form the minority class; all
//! other rows form the majority. Oversamplers (SMOTE, ADASYN,
//! Borderline-SMOTE) synthesize minority rows by interpolating between
//! minority neighbors on the concatenated `(x, y)` vector; NearMiss-1
//! undersamples the majority instead. [`augment`] applies a plan and returns
//! the combined dataset.

mod knn;
mod nearmiss;
mod oversample;

pub use knn::k_nearest;
pub use nearmiss::nearmiss;
pub(crate) use oversample::oversample_majority;
pub use oversample::{adasyn, borderline_smote, smote, OversampleOutput};

use alloc::string::String;
use alloc::vec::Vec;

use crate::embed::EmbeddedDataset;
use crate::math;
use crate::{Error, Result};

/// The resampling algorithm applied by [`augment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMethod {
    Smote,
    Adasyn,
    BorderlineSmote,
    NearMiss,
    None,
}

impl ResampleMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ResampleMethod::Smote => "smote",
            ResampleMethod::Adasyn => "adasyn",
            ResampleMethod::BorderlineSmote => "bsmote",
            ResampleMethod::NearMiss => "nearmiss",
            ResampleMethod::None => "none",
        }
    }

    pub fn is_oversampler(&self) -> bool {
        matches!(
            self,
            ResampleMethod::Smote | ResampleMethod::Adasyn | ResampleMethod::BorderlineSmote
        )
    }
}

impl core::str::FromStr for ResampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smote" => Ok(ResampleMethod::Smote),
            "adasyn" => Ok(ResampleMethod::Adasyn),
            "bsmote" | "borderline-smote" | "borderline_smote" => {
                Ok(ResampleMethod::BorderlineSmote)
            }
            "nearmiss" | "nm" => Ok(ResampleMethod::NearMiss),
            "none" => Ok(ResampleMethod::None),
            _ => Err(Error::InvalidPlan {
                reason: "unknown resample method",
            }),
        }
    }
}

impl core::fmt::Display for ResampleMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully determines one resampling application: method, neighborhood size,
/// desired minority:majority ratio, RNG seed and the entity of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePlan {
    pub method: ResampleMethod,
    pub k: usize,
    pub ratio: f64,
    pub seed: u64,
    pub target_id: String,
    /// NearMiss variant selector. Only variant 1 (mean distance to the k
    /// nearest minority rows) is implemented.
    pub nearmiss_version: u8,
}

impl ResamplePlan {
    pub fn new(
        method: ResampleMethod,
        k: usize,
        ratio: f64,
        seed: u64,
        target_id: impl Into<String>,
    ) -> Result<Self> {
        let plan = Self {
            method,
            k,
            ratio,
            seed,
            target_id: target_id.into(),
            nearmiss_version: 1,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidPlan {
                reason: "neighborhood size k must be at least 1",
            });
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) || !self.ratio.is_finite() {
            return Err(Error::InvalidPlan {
                reason: "sampling ratio must lie in (0, 1]",
            });
        }
        if self.nearmiss_version != 1 {
            return Err(Error::InvalidPlan {
                reason: "only NearMiss-1 is implemented",
            });
        }
        Ok(())
    }
}

/// An embedded dataset plus the binary indicator that marks rows of the
/// series of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    base: EmbeddedDataset,
    labels: Vec<bool>,
    target_id: String,
}

impl LabeledDataset {
    pub fn base(&self) -> &EmbeddedDataset {
        &self.base
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn target_id(&self) -> &str {
        &self.target_id
    }

    pub fn minority_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn majority_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, b)| !**b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Concatenated `(x, y)` vectors, the space all distances are measured in.
    pub(crate) fn joint_rows(&self) -> Vec<Vec<f64>> {
        self.base.samples().iter().map(|s| s.joint()).collect()
    }
}

/// Marks each row with `true` iff it originates from `target_id`.
pub fn label(dataset: &EmbeddedDataset, target_id: &str) -> Result<LabeledDataset> {
    let labels: Vec<bool> = dataset
        .samples()
        .iter()
        .map(|s| s.origin_id == target_id)
        .collect();
    if !labels.iter().any(|b| *b) {
        return Err(Error::UnknownTarget {
            id: target_id.into(),
        });
    }
    Ok(LabeledDataset {
        base: dataset.clone(),
        labels,
        target_id: target_id.into(),
    })
}

/// Number of synthetic rows an oversampler must emit to reach minority count
/// `ceil(ratio * n_maj)`: zero when the dataset already satisfies the ratio.
pub fn required_synthetics(n_min: usize, n_maj: usize, ratio: f64) -> usize {
    let desired = math::ceil(ratio * n_maj as f64) as usize;
    desired.saturating_sub(n_min)
}

/// Result of [`augment`]: the training dataset a learner would see, with the
/// parent pair of every synthetic row recorded for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentOutcome {
    /// Original rows in input order, synthetic rows appended (oversamplers);
    /// the reduced dataset (NearMiss); the input unchanged (None).
    pub dataset: EmbeddedDataset,
    /// Per synthetic row, the two parent indices into the input dataset.
    pub synthetic_parents: Vec<[usize; 2]>,
    /// True when ADASYN or Borderline-SMOTE degenerated to plain SMOTE.
    pub fell_back: bool,
}

/// Applies `plan` to the labeled dataset.
pub fn augment(data: &LabeledDataset, plan: &ResamplePlan) -> Result<AugmentOutcome> {
    plan.validate()?;
    if plan.target_id != data.target_id() {
        return Err(Error::PlanMismatch {
            reason: "plan target does not match the labeled dataset's target",
        });
    }
    match plan.method {
        ResampleMethod::None => Ok(AugmentOutcome {
            dataset: data.base().clone(),
            synthetic_parents: Vec::new(),
            fell_back: false,
        }),
        ResampleMethod::NearMiss => Ok(AugmentOutcome {
            dataset: nearmiss(data, plan)?,
            synthetic_parents: Vec::new(),
            fell_back: false,
        }),
        ResampleMethod::Smote | ResampleMethod::Adasyn | ResampleMethod::BorderlineSmote => {
            let out = match plan.method {
                ResampleMethod::Smote => smote(data, plan)?,
                ResampleMethod::Adasyn => adasyn(data, plan)?,
                _ => borderline_smote(data, plan)?,
            };
            let mut dataset = data.base().clone();
            dataset.extend(out.synthetic)?;
            Ok(AugmentOutcome {
                dataset,
                synthetic_parents: out.parents,
                fell_back: out.fell_back,
            })
        }
    }
}
