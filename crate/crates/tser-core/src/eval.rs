//! Forecast scoring and cross-series comparison.
//!
//! MASE under a rolling-origin scheme scores one (series, method) cell;
//! [`compare`] aggregates a cell matrix into average ranks, percentage
//! differences against the Global and Local references, and the Bayesian
//! signed-rank triple against Global.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::learn::DirectForecaster;
use crate::math;
use crate::series::SeriesCollection;
use crate::{Error, Result};

/// Mean absolute scaled error: the mean absolute forecast error divided by
/// the in-sample mean absolute error of the `season`-step naive forecast on
/// the training segment.
pub fn mase(train: &[f64], actuals: &[f64], forecasts: &[f64], season: usize) -> Result<f64> {
    if actuals.len() != forecasts.len() {
        return Err(Error::DimensionMismatch {
            expected: actuals.len(),
            got: forecasts.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::NoTestWindow { id: String::new() });
    }
    let season = season.max(1);
    if train.len() <= season {
        return Err(Error::ConstantTrain { id: String::new() });
    }
    let naive_mae = train
        .windows(season + 1)
        .map(|w| math::abs(w[season] - w[0]))
        .sum::<f64>()
        / (train.len() - season) as f64;
    if naive_mae == 0.0 {
        return Err(Error::ConstantTrain { id: String::new() });
    }
    let forecast_mae = actuals
        .iter()
        .zip(forecasts)
        .map(|(a, f)| math::abs(a - f))
        .sum::<f64>()
        / actuals.len() as f64;
    Ok(forecast_mae / naive_mae)
}

/// Rolling-origin evaluation of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesScore {
    pub mase: f64,
    /// One forecast vector per test origin.
    pub forecasts: Vec<Vec<f64>>,
    /// Matching actual values per test origin.
    pub actuals: Vec<Vec<f64>>,
}

/// Scores a fitted forecaster on the test segment of one series.
///
/// For every test origin `i` (each time index from the end of the training
/// segment up to the last full horizon window), the model receives the true
/// last `q` observations and forecasts `h` steps; errors are averaged over
/// all origins and steps, then scaled by the training segment's naive MAE.
pub fn score_series(
    model: &DirectForecaster,
    id: &str,
    values: &[f64],
    train_len: usize,
    season: usize,
) -> Result<SeriesScore> {
    let q = model.q();
    let h = model.h();
    let first = train_len.max(q);
    if values.len() < h || first > values.len() - h || train_len >= values.len() {
        return Err(Error::NoTestWindow { id: id.into() });
    }
    let mut forecasts = Vec::new();
    let mut actuals = Vec::new();
    let mut flat_forecasts = Vec::new();
    let mut flat_actuals = Vec::new();
    for origin in first..=values.len() - h {
        let forecast = model.forecast(&values[origin - q..origin])?;
        let actual = values[origin..origin + h].to_vec();
        flat_forecasts.extend_from_slice(&forecast);
        flat_actuals.extend_from_slice(&actual);
        forecasts.push(forecast);
        actuals.push(actual);
    }
    let mase =
        mase(&values[..train_len], &flat_actuals, &flat_forecasts, season).map_err(
            |e| match e {
                Error::ConstantTrain { .. } => Error::ConstantTrain { id: id.into() },
                other => other,
            },
        )?;
    Ok(SeriesScore {
        mase,
        forecasts,
        actuals,
    })
}

/// One scored (dataset, target series, method) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRun {
    pub dataset: String,
    pub target_id: String,
    pub method: String,
    pub score: SeriesScore,
}

/// Mid-ranked positions (1 = lowest score); tied scores share the average of
/// the positions they span.
pub fn rank_with_ties(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; scores.len()];
    let mut at = 0;
    while at < order.len() {
        let mut end = at + 1;
        while end < order.len() && scores[order[end]] == scores[order[at]] {
            end += 1;
        }
        let mid = (at + 1 + end) as f64 / 2.0;
        for &index in &order[at..end] {
            ranks[index] = mid;
        }
        at = end;
    }
    ranks
}

/// Average rank of each method over problems; every method must be scored on
/// every problem (missing or NaN scores are aggregation errors).
pub fn average_rank(scores: &BTreeMap<String, Vec<f64>>) -> Result<BTreeMap<String, f64>> {
    let methods: Vec<&String> = scores.keys().collect();
    if methods.is_empty() {
        return Err(Error::TooFewProblems { got: 0 });
    }
    let problems = scores[methods[0]].len();
    for (method, vec) in scores {
        if vec.len() != problems {
            return Err(Error::MissingScore {
                method: method.clone(),
                problem: String::new(),
            });
        }
        if let Some(at) = vec.iter().position(|v| v.is_nan()) {
            return Err(Error::MissingScore {
                method: method.clone(),
                problem: alloc::format!("{at}"),
            });
        }
    }
    let mut totals: BTreeMap<String, f64> = methods.iter().map(|m| ((*m).clone(), 0.0)).collect();
    #[allow(clippy::needless_range_loop)]
    for problem in 0..problems {
        let column: Vec<f64> = methods.iter().map(|m| scores[*m][problem]).collect();
        for (method, rank) in methods.iter().zip(rank_with_ties(&column)) {
            *totals.get_mut(*method).expect("method present") += rank;
        }
    }
    Ok(totals
        .into_iter()
        .map(|(m, total)| (m, total / problems as f64))
        .collect())
}

/// Signed percentage difference of a method against a reference score;
/// negative values mean the method performed better.
pub fn pct_diff(method_score: f64, reference_score: f64) -> Result<f64> {
    if reference_score.is_nan() || reference_score <= 0.0 {
        return Err(Error::NonPositiveReference {
            value: reference_score,
        });
    }
    Ok(100.0 * (method_score - reference_score) / reference_score)
}

/// Posterior probabilities of a method winning, drawing within the ROPE, or
/// losing against the reference its differences were taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesTriple {
    pub p_win: f64,
    pub p_rope: f64,
    pub p_lose: f64,
}

/// Bayesian signed-rank comparison over per-problem percentage differences
/// (negative = method better).
///
/// Each Monte Carlo draw weights the observations plus one pseudo-observation
/// at zero with a flat Dirichlet, splits the weighted pairwise-mean mass into
/// the regions left of, inside, and right of the ROPE, and votes for the
/// heaviest region. Deterministic under `seed`.
pub fn bayesian_signed_rank(
    diffs: &[f64],
    rope: (f64, f64),
    draws: usize,
    seed: u64,
) -> Result<BayesTriple> {
    if diffs.len() < 2 {
        return Err(Error::TooFewProblems { got: diffs.len() });
    }
    if rope.0.is_nan() || rope.1.is_nan() || rope.0 >= rope.1 {
        return Err(Error::InvalidRope {
            lo: rope.0,
            hi: rope.1,
        });
    }
    if draws < 1000 {
        return Err(Error::TooFewDraws { got: draws });
    }
    let mut z = Vec::with_capacity(diffs.len() + 1);
    z.push(0.0);
    z.extend_from_slice(diffs);
    let n = z.len();
    // Classify each unordered pair once: -1 left of the ROPE, 0 inside, 1 right.
    let mut region = vec![0i8; n * n];
    for i in 0..n {
        for j in i..n {
            let mid = (z[i] + z[j]) / 2.0;
            let r = if mid < rope.0 {
                -1
            } else if mid > rope.1 {
                1
            } else {
                0
            };
            region[i * n + j] = r;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![0.0; n];
    let mut votes = [0usize; 3];
    for _ in 0..draws {
        let mut total = 0.0;
        for w in weights.iter_mut() {
            // Normalized Exp(1) draws are a flat Dirichlet.
            *w = -math::ln(rng.gen_range(f64::MIN_POSITIVE..1.0));
            total += *w;
        }
        let mut mass = [0.0f64; 3];
        for i in 0..n {
            mass[(region[i * n + i] + 1) as usize] += weights[i] * weights[i];
            for j in i + 1..n {
                mass[(region[i * n + j] + 1) as usize] += 2.0 * weights[i] * weights[j];
            }
        }
        let total2 = total * total;
        let (win, in_rope, lose) = (mass[0] / total2, mass[1] / total2, mass[2] / total2);
        // Ties (measure zero) resolve towards the ROPE, then towards a win.
        if in_rope >= win && in_rope >= lose {
            votes[1] += 1;
        } else if win >= lose {
            votes[0] += 1;
        } else {
            votes[2] += 1;
        }
    }
    Ok(BayesTriple {
        p_win: votes[0] as f64 / draws as f64,
        p_rope: votes[1] as f64 / draws as f64,
        p_lose: votes[2] as f64 / draws as f64,
    })
}

/// How much worse the model is on the rest of the collection than on the
/// series it was fitted for: `mean(MASE on others) - MASE on target`.
pub fn other_series_gap(
    model: &DirectForecaster,
    collection: &SeriesCollection,
    train_fraction: f64,
    target_id: &str,
    season: usize,
) -> Result<f64> {
    if collection.n() < 2 {
        return Err(Error::TooFewProblems {
            got: collection.n(),
        });
    }
    if collection.get(target_id).is_none() {
        return Err(Error::UnknownSeries {
            id: target_id.into(),
        });
    }
    let mut target_mase = 0.0;
    let mut others = Vec::new();
    for series in collection.series() {
        let train_len = series.train_len(train_fraction)?;
        let score = score_series(model, series.id(), series.values(), train_len, season)?;
        if series.id() == target_id {
            target_mase = score.mase;
        } else {
            others.push(score.mase);
        }
    }
    Ok(others.iter().sum::<f64>() / others.len() as f64 - target_mase)
}

/// Aggregation inputs for [`compare`].
#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// Method treated as the Global reference (percentage differences and the
    /// Bayesian comparison are taken against it).
    pub global_method: String,
    /// Method treated as the Local reference.
    pub local_method: String,
    pub rope: (f64, f64),
    pub draws: usize,
    pub seed: u64,
}

/// Cross-series aggregation of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    /// Mean mid-rank over the problems the method was scored on; NaN when it
    /// was scored on none.
    pub avg_rank: f64,
    pub pct_diff_vs_global: Option<f64>,
    pub pct_diff_vs_local: Option<f64>,
    pub bayes_vs_global: Option<BayesTriple>,
}

/// Aggregated comparison across all problems of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub problems: Vec<String>,
    pub summaries: Vec<MethodSummary>,
}

/// Aggregates a `[problem][method]` cell matrix of MASE scores. Failed cells
/// (`None`) are excluded from ranks and pairwise differences rather than
/// aborting the aggregation.
pub fn compare(
    problems: &[String],
    methods: &[String],
    cells: &[Vec<Option<f64>>],
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    if cells.len() != problems.len() || cells.iter().any(|row| row.len() != methods.len()) {
        return Err(Error::DimensionMismatch {
            expected: methods.len(),
            got: 0,
        });
    }
    let mut rank_sum = vec![0.0; methods.len()];
    let mut rank_count = vec![0usize; methods.len()];
    for row in cells {
        let present: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter_map(|(m, score)| score.map(|s| (m, s)))
            .collect();
        if present.is_empty() {
            continue;
        }
        let column: Vec<f64> = present.iter().map(|(_, s)| *s).collect();
        for ((m, _), rank) in present.iter().zip(rank_with_ties(&column)) {
            rank_sum[*m] += rank;
            rank_count[*m] += 1;
        }
    }
    let reference_column = |name: &str| -> Option<usize> { methods.iter().position(|m| m == name) };
    let global = reference_column(&opts.global_method);
    let local = reference_column(&opts.local_method);
    let diffs_against = |reference: usize, method: usize| -> Vec<f64> {
        cells
            .iter()
            .filter_map(|row| match (row[method], row[reference]) {
                (Some(m), Some(r)) if r > 0.0 => pct_diff(m, r).ok(),
                _ => None,
            })
            .collect()
    };
    let mut summaries = Vec::with_capacity(methods.len());
    for (m, method) in methods.iter().enumerate() {
        let avg_rank = if rank_count[m] == 0 {
            f64::NAN
        } else {
            rank_sum[m] / rank_count[m] as f64
        };
        let mean = |diffs: &[f64]| -> Option<f64> {
            (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64)
        };
        let pct_global = global
            .map(|g| diffs_against(g, m))
            .as_deref()
            .and_then(mean);
        let pct_local = local.map(|l| diffs_against(l, m)).as_deref().and_then(mean);
        let bayes = match global {
            Some(g) => {
                let diffs = diffs_against(g, m);
                if diffs.len() >= 2 {
                    Some(bayesian_signed_rank(
                        &diffs, opts.rope, opts.draws, opts.seed,
                    )?)
                } else {
                    None
                }
            }
            None => None,
        };
        summaries.push(MethodSummary {
            method: method.clone(),
            avg_rank,
            pct_diff_vs_global: pct_global,
            pct_diff_vs_local: pct_local,
            bayes_vs_global: bayes,
        });
    }
    Ok(ComparisonReport {
        problems: problems.to_vec(),
        summaries,
    })
}
