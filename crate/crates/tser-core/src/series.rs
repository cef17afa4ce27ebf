//! Validated domain types for univariate series and collections of them.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A univariate time series: an id plus a time-ordered sequence of finite values.
///
/// The index is the clock; no calendar information is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Validates and wraps a value sequence.
    ///
    /// Fails when the sequence is empty or contains a NaN or infinity.
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::EmptySeries { id });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { id, index });
        }
        Ok(Self { id, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a validated series; present for slice-like ergonomics.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Splits the series into an initial training part holding
    /// `floor(train_fraction * len)` observations and a test part holding the
    /// remainder. Concatenating the parts reproduces the input.
    pub fn split_train_test(&self, train_fraction: f64) -> Result<(TimeSeries, TimeSeries)> {
        let train_len = self.train_len(train_fraction)?;
        if train_len == 0 || train_len == self.len() {
            return Err(Error::DegenerateSplit {
                id: self.id.clone(),
                train_len,
            });
        }
        let train = TimeSeries {
            id: self.id.clone(),
            values: self.values[..train_len].to_vec(),
        };
        let test = TimeSeries {
            id: self.id.clone(),
            values: self.values[train_len..].to_vec(),
        };
        Ok((train, test))
    }

    /// Length of the initial training part for a split fraction, without
    /// materializing the split.
    pub fn train_len(&self, train_fraction: f64) -> Result<usize> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidFraction {
                value: train_fraction,
            });
        }
        Ok(crate::math::floor(train_fraction * self.len() as f64) as usize)
    }

    /// Keeps the first `len` observations under the same id.
    pub fn prefix(&self, len: usize) -> Result<TimeSeries> {
        let len = len.min(self.len());
        TimeSeries::new(self.id.clone(), self.values[..len].to_vec())
    }
}

/// An ordered collection of series with unique ids, plus the forecasting
/// horizon and a frequency label shared by the collection.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCollection {
    series: Vec<TimeSeries>,
    frequency: String,
    horizon: usize,
}

impl SeriesCollection {
    pub fn new(
        series: Vec<TimeSeries>,
        frequency: impl Into<String>,
        horizon: usize,
    ) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if horizon == 0 {
            return Err(Error::InvalidWindow { what: "horizon" });
        }
        let mut seen = BTreeSet::new();
        for s in &series {
            if !seen.insert(s.id()) {
                return Err(Error::DuplicateId { id: s.id().into() });
            }
        }
        Ok(Self {
            series,
            frequency: frequency.into(),
            horizon,
        })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    /// Number of series in the collection.
    pub fn n(&self) -> usize {
        self.series.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn frequency(&self) -> &str {
        &self.frequency
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.id() == id)
    }

    /// Rebuilds the collection with each series transformed independently.
    pub fn map_series(
        &self,
        mut f: impl FnMut(&TimeSeries) -> Result<TimeSeries>,
    ) -> Result<SeriesCollection> {
        let series = self.series.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        SeriesCollection::new(series, self.frequency.clone(), self.horizon)
    }
}
