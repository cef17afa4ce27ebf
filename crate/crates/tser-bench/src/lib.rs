//! Benchmark harness around `tser-core`: configuration, the long-format file
//! exchange, the leave-one-series-out protocol and its report files.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;

pub use error::BenchError;

/// Result alias for harness operations.
pub type Result<T> = std::result::Result<T, BenchError>;
