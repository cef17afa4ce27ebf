//! Result tables and the run manifest.
//!
//! All file contents are assembled in memory first: a failed run writes
//! nothing, a successful one writes every file. Number formatting uses the
//! shortest round-trip representation, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::runner::RunOutput;
use crate::{BenchError, Result};

#[derive(Serialize)]
struct Manifest {
    config_hash: String,
    seed: u64,
    dataset: String,
    targets: Vec<String>,
    lags: usize,
    horizon: usize,
    train_fraction: f64,
    season_period: usize,
    learner: String,
    methods: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviant_id: Option<String>,
    versions: BTreeMap<String, String>,
    failures: Vec<FailureEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realized_ratios: Option<BTreeMap<String, BTreeMap<String, f64>>>,
}

#[derive(Serialize)]
struct FailureEntry {
    target: String,
    method: String,
    message: String,
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| format!("{v}"))
}

/// `per_series_scores.csv`: one row per (target, method) cell.
pub fn per_series_scores_csv(output: &RunOutput) -> String {
    let mut text = String::from("dataset,target_id,method,mase\n");
    for (p, problem) in output.problems.iter().enumerate() {
        for (m, method) in output.methods.iter().enumerate() {
            let mase = output.cells[p][m].map_or_else(|| "NaN".into(), |v| format!("{v}"));
            writeln!(text, "{},{problem},{method},{mase}", output.dataset).expect("string write");
        }
    }
    text
}

/// `summary.csv`: cross-series aggregation per method.
pub fn summary_csv(output: &RunOutput) -> String {
    let mut text =
        String::from("method,avg_rank,pct_diff_vs_global,pct_diff_vs_local,p_win,p_rope,p_lose\n");
    for summary in &output.report.summaries {
        let (p_win, p_rope, p_lose) = summary.bayes_vs_global.map_or((None, None, None), |b| {
            (Some(b.p_win), Some(b.p_rope), Some(b.p_lose))
        });
        writeln!(
            text,
            "{},{},{},{},{},{},{}",
            summary.method,
            summary.avg_rank,
            fmt_opt(summary.pct_diff_vs_global),
            fmt_opt(summary.pct_diff_vs_local),
            fmt_opt(p_win),
            fmt_opt(p_rope),
            fmt_opt(p_lose),
        )
        .expect("string write");
    }
    text
}

/// `ratio_sweep.csv`: average rank per sweep variant, with the mean realized
/// sampling ratio across targets.
pub fn ratio_sweep_csv(output: &RunOutput) -> String {
    let mut by_method: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (method, _, rho) in &output.realized_ratios {
        by_method.entry(method).or_default().push(*rho);
    }
    let mut text = String::from("variant,label,mean_realized_ratio,avg_rank\n");
    for (variant, summary) in output.report.summaries.iter().enumerate() {
        let mean_rho = by_method
            .get(summary.method.as_str())
            .map(|v| v.iter().sum::<f64>() / v.len() as f64);
        writeln!(
            text,
            "{variant},{},{},{}",
            summary.method,
            fmt_opt(mean_rho),
            summary.avg_rank
        )
        .expect("string write");
    }
    text
}

fn manifest_json(config: &ExperimentConfig, output: &RunOutput) -> String {
    let mut versions = BTreeMap::new();
    versions.insert("tser-core".to_string(), tser_core::VERSION.to_string());
    versions.insert(
        "tser-bench".to_string(),
        env!("CARGO_PKG_VERSION").to_string(),
    );
    let realized_ratios = if output.realized_ratios.is_empty() {
        None
    } else {
        let mut map: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (method, target, rho) in &output.realized_ratios {
            map.entry(method.clone())
                .or_default()
                .insert(target.clone(), *rho);
        }
        Some(map)
    };
    let manifest = Manifest {
        config_hash: config.config_hash(),
        seed: config.seed,
        dataset: output.dataset.clone(),
        targets: output.problems.clone(),
        lags: config.protocol.lags,
        horizon: config.protocol.horizon,
        train_fraction: config.protocol.train_fraction,
        season_period: config.protocol.season_period,
        learner: config.learner.describe(),
        methods: output.methods.clone(),
        deviant_id: config
            .data
            .generator
            .as_ref()
            .map(|g| tser_core::generate::GeneratorSpec::series_id(g.n_series - 1)),
        versions,
        failures: output
            .failures
            .iter()
            .map(|f| FailureEntry {
                target: f.target.clone(),
                method: f.method.clone(),
                message: f.message.clone(),
            })
            .collect(),
        realized_ratios,
    };
    serde_json::to_string_pretty(&manifest).expect("manifest serializes")
}

/// Writes the result tables and manifest. Nothing is written unless every
/// file rendered successfully.
pub fn write_report(
    out_dir: &Path,
    config: &ExperimentConfig,
    output: &RunOutput,
) -> Result<Vec<PathBuf>> {
    let mut files: Vec<(&str, String)> = vec![
        ("per_series_scores.csv", per_series_scores_csv(output)),
        ("summary.csv", summary_csv(output)),
        ("manifest.json", manifest_json(config, output)),
    ];
    if !output.realized_ratios.is_empty() {
        files.push(("ratio_sweep.csv", ratio_sweep_csv(output)));
    }
    std::fs::create_dir_all(out_dir).map_err(BenchError::io(out_dir))?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, content).map_err(BenchError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}
