use alloc::string::String;
use core::fmt;

/// Errors returned by this crate.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A series contained no observations.
    EmptySeries { id: String },
    /// A series contained a NaN or infinite value.
    NonFiniteValue { id: String, index: usize },
    /// Two series in a collection share the same id.
    DuplicateId { id: String },
    /// A collection must hold at least one series.
    EmptyCollection,
    /// Horizon and lag counts must be at least 1.
    InvalidWindow { what: &'static str },
    /// A fraction parameter was outside the open interval (0, 1).
    InvalidFraction { value: f64 },
    /// A train/test split left one side without observations.
    DegenerateSplit { id: String, train_len: usize },
    /// Generator configuration was unusable.
    GeneratorConfig { reason: &'static str },
    /// A series' fitted mean is too close to zero to divide by.
    NearZeroMean { id: String, mean: f64 },
    /// A series id was not found where one was required.
    UnknownSeries { id: String },
    /// Vectors of mismatched dimension were combined.
    DimensionMismatch { expected: usize, got: usize },
    /// An embedded sample did not match the dataset's lag/horizon shape.
    SampleShape {
        expected_q: usize,
        expected_h: usize,
        got_q: usize,
        got_h: usize,
    },
    /// The resampling target id labels no row of the dataset.
    UnknownTarget { id: String },
    /// Oversampling needs at least two minority rows to interpolate.
    TooFewMinority { count: usize },
    /// Undersampling needs at least one row on each side.
    EmptyClass { class: &'static str },
    /// A resample plan failed validation.
    InvalidPlan { reason: &'static str },
    /// A regime required a resample plan (or was given one it cannot use).
    PlanMismatch { reason: &'static str },
    /// A learner was asked to fit zero rows.
    EmptyTrainingSet,
    /// The naive-forecast denominator of MASE vanished (constant training series).
    ConstantTrain { id: String },
    /// A percentage difference needs a strictly positive reference score.
    NonPositiveReference { value: f64 },
    /// No full forecast window fits inside the test segment.
    NoTestWindow { id: String },
    /// A method is missing a score for a problem during aggregation.
    MissingScore { method: String, problem: String },
    /// The Bayesian comparison needs at least two problems.
    TooFewProblems { got: usize },
    /// The ROPE interval was empty or inverted.
    InvalidRope { lo: f64, hi: f64 },
    /// Too few Monte Carlo draws for a stable posterior estimate.
    TooFewDraws { got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySeries { id } => write!(f, "series '{id}' has no observations"),
            Error::NonFiniteValue { id, index } => {
                write!(f, "series '{id}' has a non-finite value at index {index}")
            }
            Error::DuplicateId { id } => write!(f, "duplicate series id '{id}' in collection"),
            Error::EmptyCollection => write!(f, "collection holds no series"),
            Error::InvalidWindow { what } => write!(f, "{what} must be at least 1"),
            Error::InvalidFraction { value } => {
                write!(f, "fraction {value} is outside the open interval (0, 1)")
            }
            Error::DegenerateSplit { id, train_len } => write!(
                f,
                "split of series '{id}' leaves an empty part (train length {train_len})"
            ),
            Error::GeneratorConfig { reason } => write!(f, "generator config: {reason}"),
            Error::NearZeroMean { id, mean } => write!(
                f,
                "series '{id}' has near-zero mean {mean:e}; mean normalization is undefined"
            ),
            Error::UnknownSeries { id } => write!(f, "unknown series id '{id}'"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::SampleShape { expected_q, expected_h, got_q, got_h } => write!(
                f,
                "sample shape ({got_q} lags, {got_h} targets) does not match dataset ({expected_q}, {expected_h})"
            ),
            Error::UnknownTarget { id } => {
                write!(f, "target id '{id}' labels no row of the dataset")
            }
            Error::TooFewMinority { count } => write!(
                f,
                "oversampling needs at least 2 minority rows, found {count}"
            ),
            Error::EmptyClass { class } => write!(f, "no {class} rows to resample"),
            Error::InvalidPlan { reason } => write!(f, "invalid resample plan: {reason}"),
            Error::PlanMismatch { reason } => write!(f, "regime/plan mismatch: {reason}"),
            Error::EmptyTrainingSet => write!(f, "cannot fit a learner on an empty training set"),
            Error::ConstantTrain { id } => write!(
                f,
                "series '{id}' has a constant training segment; the MASE denominator is zero"
            ),
            Error::NonPositiveReference { value } => {
                write!(f, "reference score {value} must be strictly positive")
            }
            Error::NoTestWindow { id } => write!(
                f,
                "series '{id}' has no test origin with a full forecast window"
            ),
            Error::MissingScore { method, problem } => {
                write!(f, "method '{method}' has no score for problem '{problem}'")
            }
            Error::TooFewProblems { got } => {
                write!(f, "comparison needs at least 2 problems, got {got}")
            }
            Error::InvalidRope { lo, hi } => write!(f, "invalid ROPE [{lo}, {hi}]"),
            Error::TooFewDraws { got } => {
                write!(f, "Monte Carlo comparison needs at least 1000 draws, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
