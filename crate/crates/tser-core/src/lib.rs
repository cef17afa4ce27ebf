//! Core building blocks for entity-targeted resampling of time series collections.
//!
//! A collection of univariate series is brought to a common scale with mean
//! normalization, turned into a supervised matrix with time delay embedding,
//! and labeled with a binary indicator that marks the rows of one series of
//! interest. Resampling algorithms (SMOTE, ADASYN, Borderline-SMOTE,
//! NearMiss-1) then rebalance that matrix towards the series of interest
//! before a forecasting model is trained on it. The [`eval`] module scores
//! forecasters with MASE under a rolling-origin scheme and aggregates scores
//! across series (average ranks, percentage differences, Bayesian
//! signed-rank comparison).
//!
//! The crate is `no_std`-compatible (`alloc` is required): disable default
//! features and enable `libm`. File formats, configuration and the benchmark
//! CLI live in the companion `tser-bench` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("tser-core requires either the `std` or the `libm` feature");

mod error;
mod math;

pub mod embed;
pub mod eval;
pub mod generate;
pub mod learn;
pub mod normalize;
pub mod resample;
pub mod seed;
pub mod series;

pub use error::Error;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
