//! Mean normalization: every series is divided by the mean of its training
//! portion so all series in a collection share a common scale.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math;
use crate::series::{SeriesCollection, TimeSeries};
use crate::{Error, Result};

/// Means below this magnitude are rejected: dividing by them is numerically
/// meaningless.
pub const MEAN_EPSILON: f64 = 1e-12;

/// Which part of each series the scale is fitted on.
///
/// `Train` avoids test-set leakage under a train/test split; `Full` uses the
/// whole series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleFit {
    #[default]
    Train,
    Full,
}

/// Per-series scales fitted by [`normalize`], kept for the inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationState {
    scales: BTreeMap<String, f64>,
}

impl NormalizationState {
    pub fn scale(&self, id: &str) -> Option<f64> {
        self.scales.get(id).copied()
    }

    pub fn scales(&self) -> &BTreeMap<String, f64> {
        &self.scales
    }
}

/// Divides every series by the mean of its fitted portion.
///
/// With `ScaleFit::Train`, the mean is taken over the first
/// `floor(train_fraction * len)` observations; with `ScaleFit::Full`, over
/// the whole series. A mean within [`MEAN_EPSILON`] of zero is an error
/// naming the series. Negative means are allowed (the sign is kept, which
/// flips the series) with a warning.
pub fn normalize(
    collection: &SeriesCollection,
    train_fraction: f64,
    fit: ScaleFit,
) -> Result<(SeriesCollection, NormalizationState)> {
    let mut scales = BTreeMap::new();
    let normalized = collection.map_series(|series| {
        let fit_len = match fit {
            ScaleFit::Train => {
                let len = series.train_len(train_fraction)?;
                if len == 0 {
                    return Err(Error::DegenerateSplit {
                        id: series.id().into(),
                        train_len: 0,
                    });
                }
                len
            }
            ScaleFit::Full => series.len(),
        };
        let fitted = &series.values()[..fit_len];
        let mean = fitted.iter().sum::<f64>() / fitted.len() as f64;
        if math::abs(mean) <= MEAN_EPSILON {
            return Err(Error::NearZeroMean {
                id: series.id().into(),
                mean,
            });
        }
        if mean < 0.0 {
            log::warn!(
                "series '{}' has a negative fitted mean {mean}; scale sign is kept",
                series.id()
            );
        }
        scales.insert(series.id().into(), mean);
        TimeSeries::new(
            series.id(),
            series.values().iter().map(|v| v / mean).collect(),
        )
    })?;
    Ok((normalized, NormalizationState { scales }))
}

/// Inverse of [`normalize`] on arbitrary per-series vectors (e.g. forecasts):
/// multiplies each vector by the stored scale of its series.
pub fn denormalize(
    values: &BTreeMap<String, Vec<f64>>,
    state: &NormalizationState,
) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut out = BTreeMap::new();
    for (id, vec) in values {
        let scale = state
            .scale(id)
            .ok_or_else(|| Error::UnknownSeries { id: id.clone() })?;
        out.insert(id.clone(), vec.iter().map(|v| v * scale).collect());
    }
    Ok(out)
}
