//! The evaluation protocol: leave-one-series-out runs, the data-integration
//! study and the sampling-ratio sweep.
//!
//! Every series is iteratively the target: training uses the initial
//! `train_fraction` of all series, scoring uses the remaining observations of
//! the target. All randomness descends from the run seed; target iterations
//! are independent jobs, so results do not depend on the worker count.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use tser_core::embed::{embed, EmbeddedDataset};
use tser_core::eval::{compare, score_series, CompareOptions, ComparisonReport};
use tser_core::generate::{generate_synthetic_collection, GeneratorSpec};
use tser_core::learn::{
    assemble_training_set, fit_direct, shuffle_rows, DirectForecaster, Learner, Regime,
};
use tser_core::normalize::{normalize, NormalizationState};
use tser_core::resample::{ResampleMethod, ResamplePlan};
use tser_core::seed;
use tser_core::series::SeriesCollection;

use crate::config::{ExperimentConfig, MethodSpec};
use crate::{BenchError, Result};

/// CLI-level knobs of a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Cap on leave-one-out iterations (the first N series).
    pub max_series: Option<usize>,
    /// Worker threads; values below 1 behave as 1.
    pub jobs: usize,
}

/// Dataset state shared by every cell of a run.
pub struct PreparedData {
    pub name: String,
    /// Mean-normalized collection (full series).
    pub normalized: SeriesCollection,
    pub state: NormalizationState,
    pub train_lens: BTreeMap<String, usize>,
    /// Embedding of the training prefix of every series.
    pub train_embedded: EmbeddedDataset,
    pub deviant_id: Option<String>,
}

/// Loads or generates the raw collection named by the config.
pub fn load_raw(config: &ExperimentConfig) -> Result<(SeriesCollection, String, Option<String>)> {
    if let Some(path) = &config.data.path {
        let collection =
            crate::io::load_collection(path, config.protocol.horizon, &config.protocol.frequency)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        return Ok((collection, name, None));
    }
    let generator = config
        .data
        .generator
        .as_ref()
        .expect("validated: one source");
    let spec = GeneratorSpec {
        n_series: generator.n_series,
        length: generator.length,
        seed: generator.seed,
        heterogeneity: generator.heterogeneity,
        horizon: config.protocol.horizon,
        frequency: config.protocol.frequency.clone(),
    };
    let collection =
        generate_synthetic_collection(&spec).map_err(|e| BenchError::Config(e.to_string()))?;
    Ok((collection, "synthetic".into(), Some(spec.deviant_id())))
}

/// Normalizes and embeds a dataset once per run; scales do not depend on the
/// target series.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData> {
    let (raw, name, deviant_id) = load_raw(config)?;
    let q = config.protocol.lags;
    let h = config.protocol.horizon;
    let fraction = config.protocol.train_fraction;
    let season = config.protocol.season_period.max(1);
    // A series must contribute at least one training window and one full
    // test window to participate in the protocol.
    let keep: Vec<_> = raw
        .series()
        .iter()
        .filter(|s| {
            let train_len = (fraction * s.len() as f64).floor() as usize;
            let usable =
                train_len >= q + h && train_len > season && s.len() - h >= train_len.max(q);
            if !usable {
                log::warn!(
                    "series '{}' (length {}) is too short for q={q}, h={h}; skipping it",
                    s.id(),
                    s.len()
                );
            }
            usable
        })
        .cloned()
        .collect();
    if keep.is_empty() {
        return Err(BenchError::Data(format!(
            "dataset '{name}': no series is long enough for q={q}, h={h}"
        )));
    }
    let filtered =
        SeriesCollection::new(keep, raw.frequency(), raw.horizon()).map_err(BenchError::from)?;
    let (normalized, state) = normalize(&filtered, fraction, config.protocol.scale_fit.into())?;
    let train_lens: BTreeMap<String, usize> = normalized
        .series()
        .iter()
        .map(|s| {
            (
                s.id().to_string(),
                (fraction * s.len() as f64).floor() as usize,
            )
        })
        .collect();
    let train_prefixes = normalized.map_series(|s| s.prefix(train_lens[s.id()]))?;
    let train_embedded = embed(&train_prefixes, q, h)?;
    Ok(PreparedData {
        name,
        normalized,
        state,
        train_lens,
        train_embedded,
        deviant_id,
    })
}

/// One failed (target, method) cell; the run continues around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFailure {
    pub target: String,
    pub method: String,
    pub message: String,
}

/// Everything a run produces before it is written to disk.
pub struct RunOutput {
    pub dataset: String,
    pub problems: Vec<String>,
    pub methods: Vec<String>,
    /// MASE per `[problem][method]`; failures are `None`.
    pub cells: Vec<Vec<Option<f64>>>,
    pub failures: Vec<CellFailure>,
    /// `(method label, target, realized ratio)` for sweep variants.
    pub realized_ratios: Vec<(String, String, f64)>,
    pub report: ComparisonReport,
}

/// Sampling ratio that moves the minority share `lambda` of the way from its
/// natural value to a balanced dataset.
fn realized_ratio(lambda: f64, n_min: usize, n_maj: usize) -> f64 {
    if lambda >= 1.0 {
        return 1.0;
    }
    let natural = n_min as f64 / (n_min + n_maj) as f64;
    let share = natural + lambda * (0.5 - natural);
    (share / (1.0 - share)).min(1.0)
}

struct CellResult {
    mase: Option<f64>,
    failure: Option<String>,
    realized: Option<f64>,
}

/// Effective sampling ratio of one cell (sweep variants derive it from the
/// target's class counts).
pub fn cell_ratio(prepared: &PreparedData, spec: &MethodSpec, target_id: &str) -> f64 {
    match spec.ratio_lambda {
        Some(lambda) => {
            let n_min = prepared.train_embedded.count_origin(target_id);
            let n_maj = prepared.train_embedded.len() - n_min;
            realized_ratio(lambda, n_min, n_maj)
        }
        None => spec.ratio,
    }
}

/// The training set one (target, method) cell fits on, before shuffling.
/// This is the exact path `run_methods` takes.
pub fn cell_training_set(
    prepared: &PreparedData,
    spec: &MethodSpec,
    target_id: &str,
    plan_seed: u64,
) -> std::result::Result<EmbeddedDataset, tser_core::Error> {
    let plan = if spec.regime.needs_plan() {
        Some(ResamplePlan::new(
            spec.resampler,
            spec.k,
            cell_ratio(prepared, spec, target_id),
            plan_seed,
            target_id,
        )?)
    } else {
        None
    };
    assemble_training_set(
        &prepared.train_embedded,
        spec.regime,
        target_id,
        plan.as_ref(),
    )
}

fn compute_cell(
    prepared: &PreparedData,
    spec: &MethodSpec,
    target_id: &str,
    plan_seed: u64,
    season: usize,
    learner: &dyn Learner,
    global_model: Option<&DirectForecaster>,
) -> CellResult {
    let realized = spec
        .ratio_lambda
        .map(|_| cell_ratio(prepared, spec, target_id));
    let outcome = (|| -> std::result::Result<f64, tser_core::Error> {
        let series =
            prepared
                .normalized
                .get(target_id)
                .ok_or_else(|| tser_core::Error::UnknownSeries {
                    id: target_id.into(),
                })?;
        let train_len = prepared.train_lens[target_id];
        let model_storage;
        let model = match (spec.regime, global_model) {
            (Regime::Global, Some(shared)) => shared,
            _ => {
                let training_set = cell_training_set(prepared, spec, target_id, plan_seed)?;
                let shuffled = shuffle_rows(&training_set, seed::stage_seed(plan_seed, "shuffle"));
                model_storage = fit_direct(&shuffled, learner)?;
                &model_storage
            }
        };
        Ok(score_series(model, target_id, series.values(), train_len, season)?.mase)
    })();
    match outcome {
        Ok(mase) => CellResult {
            mase: Some(mase),
            failure: None,
            realized,
        },
        Err(e) => CellResult {
            mase: None,
            failure: Some(e.to_string()),
            realized,
        },
    }
}

/// Runs the full protocol for one method list.
pub fn run_methods(
    config: &ExperimentConfig,
    prepared: &PreparedData,
    methods: &[MethodSpec],
    opts: &RunOptions,
) -> Result<RunOutput> {
    let learner = config.learner.build();
    let season = config.protocol.season_period.max(1);
    let run_seed = config.seed;
    let mut problems: Vec<String> = prepared
        .normalized
        .series()
        .iter()
        .map(|s| s.id().to_string())
        .collect();
    if let Some(cap) = opts.max_series {
        problems.truncate(cap.max(1));
    }
    // The Global model does not depend on the target; fit it once.
    let global_model = if methods.iter().any(|m| m.regime == Regime::Global) {
        let shuffled = shuffle_rows(
            &prepared.train_embedded,
            seed::stage_seed(run_seed, "global-fit"),
        );
        Some(fit_direct(&shuffled, learner.as_ref())?)
    } else {
        None
    };
    let jobs = opts.jobs.max(1).min(problems.len().max(1));
    let cursor = AtomicUsize::new(0);
    let cells: Mutex<Vec<Vec<Option<f64>>>> = Mutex::new(vec![Vec::new(); problems.len()]);
    let failures: Mutex<Vec<(usize, usize, String)>> = Mutex::new(Vec::new());
    let realized: Mutex<Vec<(usize, usize, f64)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let t = cursor.fetch_add(1, Ordering::Relaxed);
                if t >= problems.len() {
                    break;
                }
                let target_id = &problems[t];
                let job_seed = seed::job_seed(run_seed, t);
                let mut row = Vec::with_capacity(methods.len());
                let mut row_failures = Vec::new();
                let mut row_realized = Vec::new();
                for (m, spec) in methods.iter().enumerate() {
                    let cell = compute_cell(
                        prepared,
                        spec,
                        target_id,
                        seed::cell_seed(job_seed, m),
                        season,
                        learner.as_ref(),
                        global_model.as_ref(),
                    );
                    if let Some(message) = cell.failure {
                        log::warn!("cell ({target_id}, {}): {message}", spec.label);
                        row_failures.push((t, m, message));
                    }
                    if let Some(rho) = cell.realized {
                        row_realized.push((t, m, rho));
                    }
                    row.push(cell.mase);
                }
                cells.lock().expect("no poisoned lock")[t] = row;
                failures
                    .lock()
                    .expect("no poisoned lock")
                    .extend(row_failures);
                realized
                    .lock()
                    .expect("no poisoned lock")
                    .extend(row_realized);
            });
        }
    });
    let cells = cells.into_inner().expect("no poisoned lock");
    if cells.iter().flatten().all(|c| c.is_none()) {
        return Err(BenchError::ZeroCells);
    }
    let mut failures = failures.into_inner().expect("no poisoned lock");
    failures.sort();
    let mut realized = realized.into_inner().expect("no poisoned lock");
    realized.sort_by_key(|r| (r.0, r.1));
    let method_labels: Vec<String> = methods.iter().map(|m| m.label.clone()).collect();
    let reference = |regime: Regime| -> String {
        methods
            .iter()
            .find(|m| m.regime == regime && m.ratio_lambda.is_none())
            .or_else(|| methods.iter().find(|m| m.regime == regime))
            .map(|m| m.label.clone())
            .unwrap_or_default()
    };
    let report = compare(
        &problems,
        &method_labels,
        &cells,
        &CompareOptions {
            global_method: reference(Regime::Global),
            local_method: reference(Regime::Local),
            rope: (config.comparison.rope[0], config.comparison.rope[1]),
            draws: config.comparison.draws,
            seed: seed::stage_seed(run_seed, "bayes"),
        },
    )?;
    Ok(RunOutput {
        dataset: prepared.name.clone(),
        problems: problems.clone(),
        methods: method_labels.clone(),
        cells,
        failures: failures
            .into_iter()
            .map(|(t, m, message)| CellFailure {
                target: problems[t].clone(),
                method: method_labels[m].clone(),
                message,
            })
            .collect(),
        realized_ratios: realized
            .into_iter()
            .map(|(t, m, rho)| (method_labels[m].clone(), problems[t].clone(), rho))
            .collect(),
        report,
    })
}

/// Leave-one-series-out benchmark over the configured methods.
pub fn run_loo(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let prepared = prepare(config)?;
    let methods = config.resolved_methods()?;
    run_methods(config, &prepared, &methods, opts)
}

/// The data-integration study: how synthetic rows are combined with the
/// original data. Runs the fixed five-method set; the resampler comes from
/// the first TSER entry of the config (SMOTE otherwise).
pub fn run_integration(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let prepared = prepare(config)?;
    let template = config
        .resolved_methods()?
        .into_iter()
        .find(|m| m.regime.needs_plan())
        .unwrap_or_else(|| MethodSpec {
            resampler: ResampleMethod::Smote,
            ..MethodSpec::plain("TSER", Regime::Tser)
        });
    let tser = |label: &str, regime: Regime| MethodSpec {
        label: label.into(),
        regime,
        resampler: template.resampler,
        k: template.k,
        ratio: template.ratio,
        ratio_lambda: None,
    };
    let methods = vec![
        MethodSpec::plain("Global", Regime::Global),
        MethodSpec::plain("Local", Regime::Local),
        tser("TSER", Regime::Tser),
        tser("TSER(Local)", Regime::TserLocal),
        tser("TSER(all)", Regime::TserAll),
    ];
    run_methods(config, &prepared, &methods, opts)
}

/// The sampling-ratio sweep: a no-resampling endpoint, the configured grid of
/// balance fractions, ending in a balanced dataset. Realized ratios are
/// per-target (they depend on series lengths) and recorded in the output.
pub fn run_ratio_sweep(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let prepared = prepare(config)?;
    let template = config
        .resolved_methods()?
        .into_iter()
        .find(|m| m.regime.needs_plan() && m.resampler.is_oversampler());
    let (resampler, k) = template.map_or((ResampleMethod::Smote, 10), |m| (m.resampler, m.k));
    let grid = &config.sweep.grid;
    let mut methods = vec![MethodSpec {
        ratio_lambda: Some(0.0),
        ..MethodSpec::plain("Global", Regime::Global)
    }];
    for (i, &lambda) in grid.iter().enumerate() {
        let label = if i + 1 == grid.len() {
            "Balanced".into()
        } else {
            format!("{}", i + 1)
        };
        methods.push(MethodSpec {
            label,
            regime: Regime::Tser,
            resampler,
            k,
            ratio: 1.0,
            ratio_lambda: Some(lambda),
        });
    }
    run_methods(config, &prepared, &methods, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realized_ratio_endpoints() {
        assert_eq!(realized_ratio(1.0, 100, 900), 1.0);
        let natural = realized_ratio(0.0, 100, 900);
        assert!((natural - 100.0 / 900.0).abs() < 1e-12);
        let mid = realized_ratio(0.5, 100, 900);
        assert!(natural < mid && mid < 1.0);
    }
}
