//! Long-format file exchange: `unique_id,ds,y` collections and resampled
//! dataset dumps.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use tser_core::embed::EmbeddedDataset;
use tser_core::series::{SeriesCollection, TimeSeries};

use crate::{BenchError, Result};

/// Ordering key parsed from the `ds` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum DsKey {
    Ordinal(i64),
    Timestamp(i64),
}

fn parse_timestamp(text: &str) -> Option<i64> {
    if let Ok(stamp) = chrono::DateTime::parse_from_rfc3339(text) {
        return Some(stamp.timestamp());
    }
    for format in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(stamp) = chrono::NaiveDateTime::parse_from_str(text, format) {
            return Some(stamp.and_utc().timestamp());
        }
    }
    chrono::NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .ok()
        .map(|d| {
            d.and_hms_opt(0, 0, 0)
                .expect("midnight exists")
                .and_utc()
                .timestamp()
        })
}

/// Reads a long-format file into a collection. `ds` may be an integer
/// ordinal or an ISO-8601 timestamp and is used only to order observations
/// within each series; series appear in first-occurrence order.
pub fn load_collection(path: &Path, horizon: usize, frequency: &str) -> Result<SeriesCollection> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| BenchError::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| BenchError::Data(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["unique_id", "ds", "y"] {
        return Err(BenchError::Data(format!(
            "{}: expected header 'unique_id,ds,y', found '{}'",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(String, String, f64, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| BenchError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let value: f64 = record[2].parse().map_err(|_| {
            BenchError::Data(format!(
                "{}: non-numeric value '{}' at row {line}",
                path.display(),
                &record[2]
            ))
        })?;
        rows.push((record[0].to_string(), record[1].to_string(), value, line));
    }
    if rows.is_empty() {
        return Err(BenchError::Data(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    // The first row decides whether `ds` is ordinal or timestamp for the file.
    let ordinal_mode = rows[0].1.parse::<i64>().is_ok();
    let mut seen: BTreeSet<(String, DsKey)> = BTreeSet::new();
    let mut order: Vec<String> = Vec::new();
    let mut grouped: std::collections::BTreeMap<String, Vec<(DsKey, f64)>> = Default::default();
    for (id, ds, value, line) in rows {
        let key = if ordinal_mode {
            DsKey::Ordinal(ds.parse::<i64>().map_err(|_| {
                BenchError::Data(format!(
                    "{}: unparsable ordinal '{ds}' at row {line}",
                    path.display()
                ))
            })?)
        } else {
            DsKey::Timestamp(parse_timestamp(&ds).ok_or_else(|| {
                BenchError::Data(format!(
                    "{}: unparsable timestamp '{ds}' at row {line}",
                    path.display()
                ))
            })?)
        };
        if !seen.insert((id.clone(), key)) {
            return Err(BenchError::Data(format!(
                "{}: duplicate (id, ds) pair ('{id}', '{ds}') at row {line}",
                path.display()
            )));
        }
        if !grouped.contains_key(&id) {
            order.push(id.clone());
        }
        grouped.entry(id).or_default().push((key, value));
    }
    let series = order
        .into_iter()
        .map(|id| {
            let mut observations = grouped.remove(&id).expect("grouped by construction");
            observations.sort_by_key(|(key, _)| *key);
            let values = observations.into_iter().map(|(_, v)| v).collect();
            TimeSeries::new(id, values).map_err(BenchError::from)
        })
        .collect::<Result<Vec<_>>>()?;
    SeriesCollection::new(series, frequency, horizon).map_err(BenchError::from)
}

/// Writes a collection in the long format with ordinal `ds` starting at 1.
/// Floats use the shortest round-trip representation, so a load of the
/// written file reproduces the values bitwise.
pub fn collection_to_csv(collection: &SeriesCollection) -> String {
    let mut out = String::from("unique_id,ds,y\n");
    for series in collection.series() {
        for (position, value) in series.values().iter().enumerate() {
            writeln!(out, "{},{},{}", series.id(), position + 1, value).expect("string write");
        }
    }
    out
}

pub fn save_collection(path: &Path, collection: &SeriesCollection) -> Result<()> {
    std::fs::write(path, collection_to_csv(collection)).map_err(BenchError::io(path))
}

/// Serializes resampled rows: `origin_id,origin_time,synthetic,x_1..x_q,y_1..y_h`,
/// with `origin_time` -1 for synthetic rows.
pub fn dataset_to_csv(dataset: &EmbeddedDataset) -> String {
    let mut header = String::from("origin_id,origin_time,synthetic");
    for i in 1..=dataset.q() {
        write!(header, ",x_{i}").expect("string write");
    }
    for i in 1..=dataset.h() {
        write!(header, ",y_{i}").expect("string write");
    }
    header.push('\n');
    let mut out = header;
    for sample in dataset.samples() {
        let time = sample.origin_time.map_or(-1i64, |t| t as i64);
        write!(out, "{},{},{}", sample.origin_id, time, sample.synthetic).expect("string write");
        for v in sample.x.iter().chain(sample.y.iter()) {
            write!(out, ",{v}").expect("string write");
        }
        out.push('\n');
    }
    out
}
