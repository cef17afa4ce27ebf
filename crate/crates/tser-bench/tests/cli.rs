//! End-to-end CLI checks through the compiled binary.

use std::path::Path;
use std::process::Command;

fn tser() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tser"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const GEN_CONFIG: &str = r#"
seed = 3

[data.generator]
n_series = 4
length = 120
seed = 3

[protocol]
lags = 10
horizon = 6

[learner]
name = "knn"
k = 10

[comparison]
draws = 2000

[[methods]]
regime = "global"
[[methods]]
regime = "local"
[[methods]]
regime = "tser"
resampler = "smote"
"#;

#[test]
fn gen_then_run_on_the_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GEN_CONFIG);
    let gen_out = dir.path().join("data");
    let status = tser()
        .args(["gen", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&gen_out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let series = gen_out.join("series.csv");
    assert!(series.exists());
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("deviant series: s004"), "{stdout}");

    // Run the protocol on the generated file instead of the generator.
    let file_config = format!(
        "{}\n",
        GEN_CONFIG.replace(
            "[data.generator]\nn_series = 4\nlength = 120\nseed = 3",
            &format!("[data]\npath = {:?}", series)
        )
    );
    let config = write_config(dir.path(), &file_config);
    let run_out = dir.path().join("results");
    let output = tser()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&run_out)
        .args(["--jobs", "2"])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    for file in ["per_series_scores.csv", "summary.csv", "manifest.json"] {
        assert!(run_out.join(file).exists(), "{file} missing");
    }
    let summary = std::fs::read_to_string(run_out.join("summary.csv")).unwrap();
    // Header plus one row per method.
    assert_eq!(summary.lines().count(), 4, "{summary}");
    let scores = std::fs::read_to_string(run_out.join("per_series_scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 1 + 4 * 3, "{scores}");
}

#[test]
fn unknown_config_key_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{GEN_CONFIG}\nbogus_key = 1\n"));
    let output = tser()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("config error"));
}

#[test]
fn missing_data_file_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = GEN_CONFIG.replace(
        "[data.generator]\nn_series = 4\nlength = 120\nseed = 3",
        "[data]\npath = \"/nonexistent/series.csv\"",
    );
    let config = write_config(dir.path(), &body);
    let output = tser()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_out_dir_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GEN_CONFIG);
    let output = tser()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn resample_dumps_synthetic_rows_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GEN_CONFIG);
    let out = dir.path().join("dump");
    let output = tser()
        .args(["resample", "--config"])
        .arg(&config)
        .args(["--target", "s002", "--method", "smote", "--ratio", "1.0"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let dump = std::fs::read_to_string(out.join("resampled.csv")).unwrap();
    let mut lines = dump.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("origin_id,origin_time,synthetic,x_1"));
    assert!(header.ends_with("y_6"));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], "s002");
        assert_eq!(fields[1], "-1");
        assert_eq!(fields[2], "true");
        assert_eq!(fields.len(), 3 + 10 + 6);
    }
    // Balancing a 4-series collection triples the target's row count:
    // 3 * per-series windows worth of synthetic rows.
    // With length 120 and train 84: 84 - 10 - 6 + 1 = 69 windows per series.
    assert_eq!(rows, 3 * 69 - 69);
}

#[test]
fn zero_scoreable_cells_exit_with_code_three_and_write_nothing() {
    // Constant series normalize fine but have a zero MASE denominator, so
    // every cell fails and the run must not leave partial files behind.
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("flat.csv");
    let mut text = String::from("unique_id,ds,y\n");
    for id in ["a", "b"] {
        for i in 0..120 {
            text.push_str(&format!("{id},{},5.0\n", i + 1));
        }
    }
    std::fs::write(&data, text).unwrap();
    let body = GEN_CONFIG.replace(
        "[data.generator]\nn_series = 4\nlength = 120\nseed = 3",
        &format!("[data]\npath = {data:?}"),
    );
    let config = write_config(dir.path(), &body);
    let out = dir.path().join("results");
    let output = tser()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(!out.exists(), "a failed run must not write partial files");
}

#[test]
fn resample_nearmiss_dumps_the_reduced_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GEN_CONFIG);
    let out = dir.path().join("dump");
    let output = tser()
        .args(["resample", "--config"])
        .arg(&config)
        .args(["--target", "s002", "--method", "nearmiss"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let dump = std::fs::read_to_string(out.join("resampled.csv")).unwrap();
    // Minority kept plus an equal number of retained majority rows.
    assert_eq!(dump.lines().count(), 1 + 2 * 69);
    assert!(dump.contains(",false"));
}
