//! Minority oversamplers: SMOTE, ADASYN and Borderline-SMOTE.
//!
//! All three emit `required_synthetics` rows by linear interpolation between
//! a minority row and one of its k nearest minority neighbors, using a
//! single scalar `u ~ Uniform(0, 1)` per row so every synthetic row lies on
//! the segment between its two parents. They differ only in how the first
//! parent is chosen. One seeded generator drives each call; sub-draws are
//! consumed in a fixed order (parent pick where applicable, neighbor pick,
//! then `u`).

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::{EmbeddedDataset, EmbeddedSample};
use crate::resample::knn::k_nearest;
use crate::resample::{required_synthetics, LabeledDataset, ResamplePlan};
use crate::{Error, Result};

/// Synthetic rows plus the parent pair behind each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct OversampleOutput {
    /// Synthetic rows only, in emission order.
    pub synthetic: EmbeddedDataset,
    /// Per row: `[first parent, neighbor parent]` as indices into the input
    /// dataset.
    pub parents: Vec<[usize; 2]>,
    /// True when the method degenerated to plain SMOTE.
    pub fell_back: bool,
}

struct Prepared {
    joint: Vec<Vec<f64>>,
    minority: Vec<usize>,
    needed: usize,
    k_eff: usize,
}

fn prepare(data: &LabeledDataset, plan: &ResamplePlan) -> Result<Prepared> {
    plan.validate()?;
    let minority = data.minority_indices();
    if minority.len() < 2 {
        return Err(Error::TooFewMinority {
            count: minority.len(),
        });
    }
    let n_maj = data.base().len() - minority.len();
    let needed = required_synthetics(minority.len(), n_maj, plan.ratio);
    let k_eff = plan.k.min(minority.len() - 1);
    if k_eff < plan.k {
        log::warn!(
            "k = {} saturated to {} available minority neighbors",
            plan.k,
            k_eff
        );
    }
    Ok(Prepared {
        joint: data.joint_rows(),
        minority,
        needed,
        k_eff,
    })
}

/// k nearest minority neighbors of each minority row, in minority order.
fn minority_neighbor_lists(p: &Prepared) -> Result<Vec<Vec<usize>>> {
    p.minority
        .iter()
        .map(|&mi| k_nearest(&p.joint, &p.joint[mi], p.k_eff, Some(&p.minority), Some(mi)))
        .collect()
}

/// One interpolated sample between dataset rows `a` and `b`.
fn interpolate(data: &LabeledDataset, a: usize, b: usize, u: f64) -> EmbeddedSample {
    let sa = &data.base().samples()[a];
    let sb = &data.base().samples()[b];
    let lerp = |va: &[f64], vb: &[f64]| -> Vec<f64> {
        va.iter().zip(vb).map(|(x, y)| x + u * (y - x)).collect()
    };
    EmbeddedSample {
        x: lerp(&sa.x, &sb.x),
        y: lerp(&sa.y, &sb.y),
        origin_id: data.target_id().into(),
        origin_time: None,
        synthetic: true,
    }
}

fn emit(
    data: &LabeledDataset,
    pairs: Vec<([usize; 2], f64)>,
    fell_back: bool,
) -> Result<OversampleOutput> {
    let mut synthetic = EmbeddedDataset::new(data.base().q(), data.base().h())?;
    let mut parents = Vec::with_capacity(pairs.len());
    for ([a, b], u) in pairs {
        synthetic.push(interpolate(data, a, b, u))?;
        parents.push([a, b]);
    }
    Ok(OversampleOutput {
        synthetic,
        parents,
        fell_back,
    })
}

/// Classic SMOTE: the first parent is a uniformly random minority row.
pub fn smote(data: &LabeledDataset, plan: &ResamplePlan) -> Result<OversampleOutput> {
    let p = prepare(data, plan)?;
    let neighbors = minority_neighbor_lists(&p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let pairs = draw_uniform_pairs(&p.minority, &neighbors, p.needed, &mut rng);
    emit(data, pairs, false)
}

fn draw_uniform_pairs(
    parent_pool: &[usize],
    pool_neighbors: &[Vec<usize>],
    needed: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<([usize; 2], f64)> {
    (0..needed)
        .map(|_| {
            let pick = rng.gen_range(0..parent_pool.len());
            let list = &pool_neighbors[pick];
            let nn = list[rng.gen_range(0..list.len())];
            let u: f64 = rng.gen();
            ([parent_pool[pick], nn], u)
        })
        .collect()
}

/// ADASYN: synthetic counts per minority row are proportional to the share
/// of majority rows among its whole-dataset neighbors, so generation
/// concentrates near the class boundary. Falls back to SMOTE when no
/// minority row has a majority neighbor.
pub fn adasyn(data: &LabeledDataset, plan: &ResamplePlan) -> Result<OversampleOutput> {
    let p = prepare(data, plan)?;
    let ratios = boundary_ratios(data, &p, plan)?;
    let total: f64 = ratios.iter().sum();
    if total == 0.0 {
        log::warn!("ADASYN: minority class is isolated; falling back to SMOTE");
        let mut out = smote(data, plan)?;
        out.fell_back = true;
        return Ok(out);
    }
    let allocation = largest_remainder(&ratios, total, p.needed);
    let neighbors = minority_neighbor_lists(&p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut pairs = Vec::with_capacity(p.needed);
    for (pos, &count) in allocation.iter().enumerate() {
        let list = &neighbors[pos];
        for _ in 0..count {
            let nn = list[rng.gen_range(0..list.len())];
            let u: f64 = rng.gen();
            pairs.push(([p.minority[pos], nn], u));
        }
    }
    emit(data, pairs, false)
}

/// Share of majority rows among each minority row's k nearest neighbors in
/// the whole dataset.
fn boundary_ratios(data: &LabeledDataset, p: &Prepared, plan: &ResamplePlan) -> Result<Vec<f64>> {
    let k_all = plan.k.min(data.base().len() - 1);
    p.minority
        .iter()
        .map(|&mi| {
            let found = k_nearest(&p.joint, &p.joint[mi], k_all, None, Some(mi))?;
            let majority = found.iter().filter(|&&i| !data.labels()[i]).count();
            Ok(majority as f64 / k_all as f64)
        })
        .collect()
}

/// Integer apportionment of `total_count` proportional to `weights`,
/// exact by construction: floors first, then the largest fractional
/// remainders (ties toward the lower index) absorb the rest.
fn largest_remainder(weights: &[f64], weight_sum: f64, total_count: usize) -> Vec<usize> {
    let quotas: Vec<f64> = weights
        .iter()
        .map(|w| w / weight_sum * total_count as f64)
        .collect();
    let mut counts: Vec<usize> = quotas
        .iter()
        .map(|q| crate::math::floor(*q) as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - counts[a] as f64;
        let fb = quotas[b] - counts[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(total_count - assigned) {
        counts[i] += 1;
    }
    counts
}

/// Grows the majority class by `count` rows with the plan's oversampler, the
/// label sense inverted: majority rows are the parent pool and boundary
/// scores count minority rows among neighbors. Synthetic rows inherit the
/// origin id of their first parent (they belong to no single series).
pub(crate) fn oversample_majority(
    data: &LabeledDataset,
    plan: &ResamplePlan,
    count: usize,
    seed: u64,
) -> Result<OversampleOutput> {
    plan.validate()?;
    let majority = data.majority_indices();
    if majority.len() < 2 {
        return Err(Error::TooFewMinority {
            count: majority.len(),
        });
    }
    let joint = data.joint_rows();
    let k_pool = plan.k.min(majority.len() - 1);
    let pool_neighbors: Vec<Vec<usize>> = majority
        .iter()
        .map(|&mj| k_nearest(&joint, &joint[mj], k_pool, Some(&majority), Some(mj)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = match plan.method {
        crate::resample::ResampleMethod::Adasyn => {
            let k_all = plan.k.min(data.base().len() - 1);
            let ratios: Vec<f64> = majority
                .iter()
                .map(|&mj| {
                    let found = k_nearest(&joint, &joint[mj], k_all, None, Some(mj))?;
                    let other = found.iter().filter(|&&i| data.labels()[i]).count();
                    Ok(other as f64 / k_all as f64)
                })
                .collect::<Result<_>>()?;
            let total: f64 = ratios.iter().sum();
            if total == 0.0 {
                draw_uniform_pairs(&majority, &pool_neighbors, count, &mut rng)
            } else {
                let allocation = largest_remainder(&ratios, total, count);
                let mut pairs = Vec::with_capacity(count);
                for (pos, &c) in allocation.iter().enumerate() {
                    let list = &pool_neighbors[pos];
                    for _ in 0..c {
                        let nn = list[rng.gen_range(0..list.len())];
                        let u: f64 = rng.gen();
                        pairs.push(([majority[pos], nn], u));
                    }
                }
                pairs
            }
        }
        crate::resample::ResampleMethod::BorderlineSmote => {
            let k_all = plan.k.min(data.base().len() - 1);
            let mut danger_rows = Vec::new();
            let mut danger_neighbors = Vec::new();
            for (pos, &mj) in majority.iter().enumerate() {
                let found = k_nearest(&joint, &joint[mj], k_all, None, Some(mj))?;
                let other = found.iter().filter(|&&i| data.labels()[i]).count();
                if other < k_all && (other as f64) >= k_all as f64 / 2.0 {
                    danger_rows.push(mj);
                    danger_neighbors.push(pool_neighbors[pos].clone());
                }
            }
            if danger_rows.is_empty() {
                draw_uniform_pairs(&majority, &pool_neighbors, count, &mut rng)
            } else {
                draw_uniform_pairs(&danger_rows, &danger_neighbors, count, &mut rng)
            }
        }
        _ => draw_uniform_pairs(&majority, &pool_neighbors, count, &mut rng),
    };
    let mut synthetic = EmbeddedDataset::new(data.base().q(), data.base().h())?;
    let mut parents = Vec::with_capacity(pairs.len());
    for ([a, b], u) in pairs {
        let mut row = interpolate(data, a, b, u);
        row.origin_id = data.base().samples()[a].origin_id.clone();
        synthetic.push(row)?;
        parents.push([a, b]);
    }
    Ok(OversampleOutput {
        synthetic,
        parents,
        fell_back: false,
    })
}

/// Borderline-SMOTE: only minority rows whose whole-dataset neighborhood is
/// majority-dominated (the DANGER set) become first parents. Falls back to
/// SMOTE when the DANGER set is empty.
pub fn borderline_smote(data: &LabeledDataset, plan: &ResamplePlan) -> Result<OversampleOutput> {
    let p = prepare(data, plan)?;
    let k_all = plan.k.min(data.base().len() - 1);
    let mut danger: Vec<usize> = Vec::new();
    for (pos, &mi) in p.minority.iter().enumerate() {
        let found = k_nearest(&p.joint, &p.joint[mi], k_all, None, Some(mi))?;
        let majority = found.iter().filter(|&&i| !data.labels()[i]).count();
        // SAFE below k/2, NOISE at exactly k, DANGER in between.
        if majority < k_all && (majority as f64) >= k_all as f64 / 2.0 {
            danger.push(pos);
        }
    }
    if danger.is_empty() {
        log::warn!("Borderline-SMOTE: DANGER set is empty; falling back to SMOTE");
        let mut out = smote(data, plan)?;
        out.fell_back = true;
        return Ok(out);
    }
    let neighbors = minority_neighbor_lists(&p)?;
    let danger_rows: Vec<usize> = danger.iter().map(|&pos| p.minority[pos]).collect();
    let danger_neighbors: Vec<Vec<usize>> =
        danger.iter().map(|&pos| neighbors[pos].clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let pairs = draw_uniform_pairs(&danger_rows, &danger_neighbors, p.needed, &mut rng);
    emit(data, pairs, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resample::{label, ResampleMethod};

    /// Two well-separated clusters: minority around the origin, majority
    /// around (10, 10 | 10).
    fn clustered(n_min: usize, n_maj: usize) -> LabeledDataset {
        let mut samples = Vec::new();
        for i in 0..n_min {
            samples.push(EmbeddedSample {
                x: vec![i as f64 * 0.1, -(i as f64) * 0.1],
                y: vec![i as f64 * 0.05],
                origin_id: "target".into(),
                origin_time: Some(i + 2),
                synthetic: false,
            });
        }
        for i in 0..n_maj {
            samples.push(EmbeddedSample {
                x: vec![10.0 + i as f64 * 0.1, 10.0 - i as f64 * 0.1],
                y: vec![10.0 + i as f64 * 0.05],
                origin_id: "other".into(),
                origin_time: Some(i + 2),
                synthetic: false,
            });
        }
        let d = EmbeddedDataset::from_samples(2, 1, samples).unwrap();
        label(&d, "target").unwrap()
    }

    fn plan(method: ResampleMethod, seed: u64) -> ResamplePlan {
        ResamplePlan::new(method, 3, 1.0, seed, "target").unwrap()
    }

    #[test]
    fn smote_emits_exact_count_with_target_origin() {
        let data = clustered(4, 9);
        let out = smote(&data, &plan(ResampleMethod::Smote, 7)).unwrap();
        assert_eq!(out.synthetic.len(), 5);
        assert_eq!(out.parents.len(), 5);
        for s in out.synthetic.samples() {
            assert_eq!(s.origin_id, "target");
            assert!(s.synthetic);
            assert_eq!(s.origin_time, None);
        }
    }

    #[test]
    fn smote_interpolation_endpoints() {
        // With u = 0 the synthetic row is a copy of the first parent; this
        // checks the convex-combination arithmetic directly instead.
        let data = clustered(2, 3);
        let row = interpolate(&data, 0, 1, 0.0);
        assert_eq!(row.x, data.base().samples()[0].x);
        let mid = interpolate(&data, 0, 1, 0.5);
        for ((m, a), b) in mid
            .x
            .iter()
            .zip(&data.base().samples()[0].x)
            .zip(&data.base().samples()[1].x)
        {
            assert!((m - (a + b) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn smote_rows_stay_inside_parent_box() {
        let data = clustered(6, 14);
        let out = smote(&data, &plan(ResampleMethod::Smote, 3)).unwrap();
        for (row, parents) in out.synthetic.samples().iter().zip(&out.parents) {
            let a = data.base().samples()[parents[0]].joint();
            let b = data.base().samples()[parents[1]].joint();
            for (value, (pa, pb)) in row.joint().iter().zip(a.iter().zip(&b)) {
                assert!(*value >= pa.min(*pb) - 1e-9 && *value <= pa.max(*pb) + 1e-9);
            }
        }
    }

    #[test]
    fn smote_needs_two_minority_rows() {
        let data = clustered(1, 5);
        assert!(matches!(
            smote(&data, &plan(ResampleMethod::Smote, 0)),
            Err(Error::TooFewMinority { count: 1 })
        ));
    }

    #[test]
    fn smote_is_deterministic() {
        let data = clustered(5, 12);
        let a = smote(&data, &plan(ResampleMethod::Smote, 9)).unwrap();
        let b = smote(&data, &plan(ResampleMethod::Smote, 9)).unwrap();
        assert_eq!(a, b);
        let c = smote(&data, &plan(ResampleMethod::Smote, 10)).unwrap();
        assert_ne!(a.parents, c.parents);
    }

    #[test]
    fn adasyn_isolated_minority_falls_back_to_smote_stream() {
        // Clusters are far apart and k < n_min, so every minority neighborhood
        // is purely minority.
        let data = clustered(5, 10);
        let p = plan(ResampleMethod::Adasyn, 21);
        let via_adasyn = adasyn(&data, &p).unwrap();
        let via_smote = smote(&data, &p).unwrap();
        assert!(via_adasyn.fell_back);
        assert_eq!(via_adasyn.synthetic, via_smote.synthetic);
        assert_eq!(via_adasyn.parents, via_smote.parents);
    }

    #[test]
    fn adasyn_boundary_ratio_definition() {
        // Both minority rows see 4 majority rows among their k = 5
        // whole-dataset neighbors, so r = 4/5 for each.
        let mut samples = vec![
            EmbeddedSample {
                x: vec![0.0, 0.0],
                y: vec![0.0],
                origin_id: "target".into(),
                origin_time: Some(2),
                synthetic: false,
            },
            EmbeddedSample {
                x: vec![0.3, 0.0],
                y: vec![0.0],
                origin_id: "target".into(),
                origin_time: Some(3),
                synthetic: false,
            },
        ];
        for (dx, dy) in [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)] {
            samples.push(EmbeddedSample {
                x: vec![dx, dy],
                y: vec![0.0],
                origin_id: "other".into(),
                origin_time: Some(2),
                synthetic: false,
            });
        }
        let data = label(
            &EmbeddedDataset::from_samples(2, 1, samples).unwrap(),
            "target",
        )
        .unwrap();
        let p = ResamplePlan::new(ResampleMethod::Adasyn, 5, 1.0, 0, "target").unwrap();
        let prepared = prepare(&data, &p).unwrap();
        let ratios = boundary_ratios(&data, &prepared, &p).unwrap();
        assert_eq!(ratios, vec![0.8, 0.8]);
    }

    #[test]
    fn largest_remainder_is_exact() {
        let counts = largest_remainder(&[0.8, 0.2], 1.0, 10);
        assert_eq!(counts, vec![8, 2]);
        let counts = largest_remainder(&[1.0, 1.0, 1.0], 3.0, 10);
        assert_eq!(counts.iter().sum::<usize>(), 10);
        assert_eq!(counts, vec![4, 3, 3]);
    }

    #[test]
    fn bsmote_all_minority_neighborhoods_fall_back() {
        let data = clustered(8, 3);
        // k = 3 with a tight minority cluster of 8: every minority row's
        // neighbors are minority, so DANGER is empty.
        let p = plan(ResampleMethod::BorderlineSmote, 5);
        let via_bsmote = borderline_smote(&data, &p).unwrap();
        let via_smote = smote(&data, &p).unwrap();
        assert!(via_bsmote.fell_back);
        assert_eq!(via_bsmote.synthetic.len(), via_smote.synthetic.len());
    }

    #[test]
    fn bsmote_noise_rows_are_never_parents() {
        // Rows 0 and 1 are DANGER (3 of their 4 whole-dataset neighbors are
        // majority); row 2 sits inside the majority cluster with all 4
        // neighbors majority, so it is NOISE and must never be a parent.
        let mut samples = vec![
            EmbeddedSample {
                x: vec![0.0, 0.0],
                y: vec![0.0],
                origin_id: "target".into(),
                origin_time: Some(2),
                synthetic: false,
            },
            EmbeddedSample {
                x: vec![0.2, 0.0],
                y: vec![0.0],
                origin_id: "target".into(),
                origin_time: Some(3),
                synthetic: false,
            },
            EmbeddedSample {
                x: vec![10.0, 10.0],
                y: vec![10.0],
                origin_id: "target".into(),
                origin_time: Some(4),
                synthetic: false,
            },
        ];
        for i in 0..8 {
            samples.push(EmbeddedSample {
                x: vec![9.8 + i as f64 * 0.1, 10.1],
                y: vec![10.0],
                origin_id: "other".into(),
                origin_time: Some(i + 2),
                synthetic: false,
            });
        }
        let data = label(
            &EmbeddedDataset::from_samples(2, 1, samples).unwrap(),
            "target",
        )
        .unwrap();
        let p = ResamplePlan::new(ResampleMethod::BorderlineSmote, 4, 1.0, 3, "target").unwrap();
        let out = borderline_smote(&data, &p).unwrap();
        assert!(!out.fell_back);
        let danger_parents: Vec<usize> = out.parents.iter().map(|p| p[0]).collect();
        for parent in danger_parents {
            let found = k_nearest(
                &data.joint_rows(),
                &data.joint_rows()[parent],
                4,
                None,
                Some(parent),
            )
            .unwrap();
            let majority = found.iter().filter(|&&i| !data.labels()[i]).count();
            assert!(
                majority < 4 && majority as f64 >= 2.0,
                "parent {parent} not DANGER"
            );
        }
    }
}
