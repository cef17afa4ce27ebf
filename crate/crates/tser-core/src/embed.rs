//! Time delay embedding: sliding windows over a collection build the
//! supervised matrix that resamplers and learners operate on.

use alloc::string::String;
use alloc::vec::Vec;

use crate::series::SeriesCollection;
use crate::{Error, Result};

/// One supervised row: `q` lags (oldest first), `h` future values, and the
/// provenance of the window.
///
/// For a non-synthetic row, `(x, y)` is a contiguous slice of the source
/// series covering positions `[origin_time - q, origin_time + h)`;
/// `origin_time` is the index of the first target value. Synthetic rows are
/// interpolations and carry no time index.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub origin_id: String,
    pub origin_time: Option<usize>,
    pub synthetic: bool,
}

impl EmbeddedSample {
    /// The concatenated `(x, y)` vector resamplers measure distances on.
    pub fn joint(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.x.len() + self.y.len());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v
    }
}

/// A list of embedded samples sharing one `(q, h)` shape.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    samples: Vec<EmbeddedSample>,
    q: usize,
    h: usize,
}

impl EmbeddedDataset {
    pub fn new(q: usize, h: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidWindow { what: "lag count" });
        }
        if h == 0 {
            return Err(Error::InvalidWindow { what: "horizon" });
        }
        Ok(Self {
            samples: Vec::new(),
            q,
            h,
        })
    }

    pub fn from_samples(q: usize, h: usize, samples: Vec<EmbeddedSample>) -> Result<Self> {
        let mut dataset = Self::new(q, h)?;
        for sample in samples {
            dataset.push(sample)?;
        }
        Ok(dataset)
    }

    /// Appends a sample, enforcing the shared shape and finiteness.
    pub fn push(&mut self, sample: EmbeddedSample) -> Result<()> {
        if sample.x.len() != self.q || sample.y.len() != self.h {
            return Err(Error::SampleShape {
                expected_q: self.q,
                expected_h: self.h,
                got_q: sample.x.len(),
                got_h: sample.y.len(),
            });
        }
        if let Some(index) = sample
            .x
            .iter()
            .chain(sample.y.iter())
            .position(|v| !v.is_finite())
        {
            return Err(Error::NonFiniteValue {
                id: sample.origin_id,
                index,
            });
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn samples(&self) -> &[EmbeddedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Row count with `origin_id == id`.
    pub fn count_origin(&self, id: &str) -> usize {
        self.samples.iter().filter(|s| s.origin_id == id).count()
    }

    /// Copy of the dataset holding only samples selected by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&EmbeddedSample) -> bool) -> EmbeddedDataset {
        EmbeddedDataset {
            samples: self.samples.iter().filter(|s| keep(s)).cloned().collect(),
            q: self.q,
            h: self.h,
        }
    }

    pub fn extend(&mut self, other: EmbeddedDataset) -> Result<()> {
        for sample in other.samples {
            self.push(sample)?;
        }
        Ok(())
    }
}

/// Slides a window of `q` lags plus `h` targets over every series of the
/// collection.
///
/// Rows are ordered by (series order, time). A series of length `t`
/// contributes `t - q - h + 1` rows, or none when `t < q + h`.
pub fn embed(collection: &SeriesCollection, q: usize, h: usize) -> Result<EmbeddedDataset> {
    let mut dataset = EmbeddedDataset::new(q, h)?;
    for series in collection.series() {
        let values = series.values();
        if values.len() < q + h {
            log::warn!(
                "series '{}' is shorter than q + h = {} and contributes no rows",
                series.id(),
                q + h
            );
            continue;
        }
        for origin_time in q..=(values.len() - h) {
            dataset.push(EmbeddedSample {
                x: values[origin_time - q..origin_time].to_vec(),
                y: values[origin_time..origin_time + h].to_vec(),
                origin_id: series.id().into(),
                origin_time: Some(origin_time),
                synthetic: false,
            })?;
        }
    }
    Ok(dataset)
}
