//! Runner-level behavior: cell bookkeeping, determinism, regime identities
//! seen through the protocol, and the sweep's endpoints.

use tser_bench::config::ExperimentConfig;
use tser_bench::runner::{
    cell_training_set, prepare, run_integration, run_loo, run_ratio_sweep, RunOptions,
};
use tser_core::learn::Regime;
use tser_core::seed;

fn generated_config(n_series: usize, length: usize, seed: u64, methods: &str) -> ExperimentConfig {
    let text = format!(
        r#"
seed = {seed}

[data.generator]
n_series = {n_series}
length = {length}
seed = {seed}

[protocol]
lags = 10
horizon = 6

[learner]
name = "knn"
k = 10

[comparison]
draws = 2000

{methods}
"#
    );
    toml::from_str(&text).expect("valid test config")
}

const GLOBAL_LOCAL: &str = "
[[methods]]
regime = \"global\"
[[methods]]
regime = \"local\"
";

#[test]
fn loo_produces_one_cell_per_series_and_method() {
    let config = generated_config(3, 120, 4, GLOBAL_LOCAL);
    let out = run_loo(&config, &RunOptions::default()).unwrap();
    assert_eq!(out.problems.len(), 3);
    assert_eq!(out.methods, vec!["Global".to_string(), "Local".to_string()]);
    let cells: Vec<_> = out.cells.iter().flatten().collect();
    assert_eq!(cells.len(), 6);
    assert!(cells.iter().all(|c| c.is_some()));
    assert!(out.failures.is_empty());
}

#[test]
fn reruns_are_identical_and_worker_count_does_not_matter() {
    let config = generated_config(5, 140, 9, "");
    let a = run_loo(
        &config,
        &RunOptions {
            max_series: None,
            jobs: 1,
        },
    )
    .unwrap();
    let b = run_loo(
        &config,
        &RunOptions {
            max_series: None,
            jobs: 4,
        },
    )
    .unwrap();
    assert_eq!(a.cells, b.cells);
    assert_eq!(a.report.summaries, b.report.summaries);

    let other_seed = {
        let mut config = config;
        config.seed = 10;
        run_loo(&config, &RunOptions::default()).unwrap()
    };
    assert_ne!(a.cells, other_seed.cells);
}

#[test]
fn max_series_caps_target_iterations() {
    let config = generated_config(6, 120, 2, GLOBAL_LOCAL);
    let out = run_loo(
        &config,
        &RunOptions {
            max_series: Some(2),
            jobs: 1,
        },
    )
    .unwrap();
    assert_eq!(out.problems, vec!["s001".to_string(), "s002".to_string()]);
}

#[test]
fn integration_runs_the_five_method_set() {
    let config = generated_config(4, 120, 6, "");
    let out = run_integration(&config, &RunOptions::default()).unwrap();
    assert_eq!(
        out.methods,
        vec!["Global", "Local", "TSER", "TSER(Local)", "TSER(all)"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    );
    // Summary rows mirror the method set.
    assert_eq!(out.report.summaries.len(), 5);
}

#[test]
fn tser_local_training_rows_are_target_only() {
    let config = generated_config(4, 120, 6, "");
    let prepared = prepare(&config).unwrap();
    let methods = [tser_bench::config::MethodSpec {
        label: "TSER(Local)".into(),
        regime: Regime::TserLocal,
        resampler: tser_core::resample::ResampleMethod::Smote,
        k: 10,
        ratio: 1.0,
        ratio_lambda: None,
    }];
    for (t, series) in prepared.normalized.series().iter().enumerate() {
        let plan_seed = seed::cell_seed(seed::job_seed(config.seed, t), 0);
        let set = cell_training_set(&prepared, &methods[0], series.id(), plan_seed).unwrap();
        assert!(set.samples().iter().all(|s| s.origin_id == series.id()));
        assert!(!set.is_empty());
    }
}

#[test]
fn tser_all_adds_half_the_majority_count() {
    let config = generated_config(4, 120, 6, "");
    let prepared = prepare(&config).unwrap();
    let tser = tser_bench::config::MethodSpec {
        label: "TSER".into(),
        regime: Regime::Tser,
        resampler: tser_core::resample::ResampleMethod::Smote,
        k: 10,
        ratio: 1.0,
        ratio_lambda: None,
    };
    let tser_all = tser_bench::config::MethodSpec {
        label: "TSER(all)".into(),
        regime: Regime::TserAll,
        ..tser.clone()
    };
    let target = "s002";
    let n_maj = prepared.train_embedded.len() - prepared.train_embedded.count_origin(target);
    let base = cell_training_set(&prepared, &tser, target, 5).unwrap();
    let extended = cell_training_set(&prepared, &tser_all, target, 5).unwrap();
    assert_eq!(extended.len() - base.len(), n_maj.div_ceil(2));
}

#[test]
fn sweep_has_twenty_variants_and_a_global_endpoint() {
    let config = generated_config(4, 140, 12, GLOBAL_LOCAL);
    let sweep = run_ratio_sweep(
        &config,
        &RunOptions {
            max_series: None,
            jobs: 2,
        },
    )
    .unwrap();
    assert_eq!(sweep.methods.len(), 20);
    assert_eq!(sweep.methods[0], "Global");
    assert_eq!(sweep.methods[19], "Balanced");

    // The no-resampling endpoint equals a plain Global run, cell for cell.
    let plain = run_loo(&config, &RunOptions::default()).unwrap();
    let global_column = plain.methods.iter().position(|m| m == "Global").unwrap();
    for (sweep_row, plain_row) in sweep.cells.iter().zip(&plain.cells) {
        assert_eq!(sweep_row[0], plain_row[global_column]);
    }

    // Realized ratios were logged for every (variant, target) pair and end
    // at the balanced ratio.
    assert_eq!(sweep.realized_ratios.len(), 20 * sweep.problems.len());
    for (method, _, rho) in &sweep.realized_ratios {
        assert!(*rho > 0.0 && *rho <= 1.0);
        if method == "Balanced" {
            assert_eq!(*rho, 1.0);
        }
    }
}

#[test]
fn short_series_are_skipped_not_fatal() {
    // 30 observations cannot host q = 10 embeddings plus a test window.
    let config = generated_config(3, 120, 8, GLOBAL_LOCAL);
    let mut config = config;
    config.data.generator = None;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let mut text = String::from("unique_id,ds,y\n");
    for i in 0..120 {
        text.push_str(&format!(
            "long_a,{},{}\n",
            i + 1,
            50.0 + (i as f64 * 0.3).sin() * 5.0
        ));
    }
    for i in 0..120 {
        text.push_str(&format!(
            "long_b,{},{}\n",
            i + 1,
            30.0 + (i as f64 * 0.4).cos() * 4.0
        ));
    }
    for i in 0..20 {
        text.push_str(&format!("short,{},{}\n", i + 1, 10.0 + i as f64));
    }
    std::fs::write(&path, text).unwrap();
    config.data.path = Some(path);
    let out = run_loo(&config, &RunOptions::default()).unwrap();
    assert_eq!(
        out.problems,
        vec!["long_a".to_string(), "long_b".to_string()]
    );
}
