//! NearMiss-1 undersampling: keep the majority rows closest to the minority.

use alloc::vec::Vec;

use crate::embed::EmbeddedDataset;
use crate::math;
use crate::resample::knn::squared_distance;
use crate::resample::{LabeledDataset, ResamplePlan};
use crate::{Error, Result};

/// Reduces the majority class to the `floor(n_min / ratio)` rows with the
/// smallest mean distance to their k nearest minority rows; all minority
/// rows are kept and no synthetic rows are created. Row order of the input
/// is preserved.
pub fn nearmiss(data: &LabeledDataset, plan: &ResamplePlan) -> Result<EmbeddedDataset> {
    plan.validate()?;
    let minority = data.minority_indices();
    let majority = data.majority_indices();
    if minority.is_empty() {
        return Err(Error::EmptyClass { class: "minority" });
    }
    if majority.is_empty() {
        return Err(Error::EmptyClass { class: "majority" });
    }
    let retain = math::floor(minority.len() as f64 / plan.ratio) as usize;
    if retain >= majority.len() {
        if retain > majority.len() {
            log::warn!(
                "NearMiss retain count {retain} exceeds the {} majority rows; keeping all",
                majority.len()
            );
        }
        return Ok(data.base().clone());
    }
    let joint = data.joint_rows();
    let k_eff = plan.k.min(minority.len());
    // Mean distance to the k nearest minority rows, per majority row.
    let mut scored: Vec<(f64, usize)> = majority
        .iter()
        .map(|&mj| {
            let mut distances: Vec<f64> = minority
                .iter()
                .map(|&mi| math::sqrt(squared_distance(&joint[mj], &joint[mi])))
                .collect();
            distances.sort_unstable_by(f64::total_cmp);
            let score = distances[..k_eff].iter().sum::<f64>() / k_eff as f64;
            (score, mj)
        })
        .collect();
    scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut keep = alloc::collections::BTreeSet::new();
    for &(_, index) in scored.iter().take(retain) {
        keep.insert(index);
    }
    let mut row = 0usize;
    Ok(data.base().filtered(|sample| {
        let index = row;
        row += 1;
        let minority_row = sample.origin_id == data.target_id();
        minority_row || keep.contains(&index)
    }))
}
