use thiserror::Error;

pub type Result<T> = std::result::Result<T, MetricError>;

/// Everything that can go wrong between ingesting a series pair and
/// producing a metric value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("length mismatch: {actual} actual values vs {predicted} predicted values")]
    LengthMismatch { actual: usize, predicted: usize },

    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("log ratio undefined at index {index}: P/A must be positive")]
    NonpositiveLogRatio { index: usize },

    #[error("zero denominator{}", fmt_index(*.index))]
    ZeroDenominator { index: Option<usize> },

    #[error("every point was skipped by the evaluation policy")]
    AllPointsSkipped,

    #[error("geometric mean undefined: zero or negative factor at index {index}")]
    GeometricMeanDomain { index: usize },

    #[error("harmonic mean undefined: zero element at index {index}")]
    HarmonicMeanDomain { index: usize },

    #[error("nothing to aggregate")]
    EmptyAggregation,

    #[error("square root of negative aggregate {value}")]
    SqrtDomain { value: f64 },

    #[error("logarithm of non-positive ratio {value}")]
    LogDomain { value: f64 },

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unknown metric '{name}'{}", fmt_suggestions(.suggestions))]
    UnknownMetric {
        name: String,
        suggestions: Vec<String>,
    },

    #[error("{metric} compares against a benchmark or in-sample series; use the derived-metric entry points")]
    RequiresBenchmark { metric: String },

    #[error("{metric} needs {needed} but none was supplied")]
    MissingBenchmark { metric: String, needed: String },

    #[error("benchmark actuals differ from evaluation actuals at index {index}")]
    BenchmarkMismatch { index: usize },

    #[error("{metric} is catalogued but not implemented: {reason}")]
    Unimplemented { metric: String, reason: String },

    #[error("variant {variant} is not available for {metric}")]
    UnsupportedVariant { metric: String, variant: String },

    #[error("two metrics claim the same chart slot: {first} and {second}")]
    DuplicateCellClaim { first: String, second: String },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

fn fmt_index(index: Option<usize>) -> String {
    index.map(|i| format!(" at index {i}")).unwrap_or_default()
}

fn fmt_suggestions(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {}?)", suggestions.join(", "))
    }
}

impl MetricError {
    /// Stable short code used in reports, e.g. `GeometricMeanDomain`.
    pub fn code(&self) -> &'static str {
        match self {
            MetricError::LengthMismatch { .. } => "LengthMismatch",
            MetricError::EmptySeries => "EmptySeries",
            MetricError::NonFiniteValue { .. } => "NonFiniteValue",
            MetricError::NonpositiveLogRatio { .. } => "NonpositiveLogRatio",
            MetricError::ZeroDenominator { .. } => "ZeroDenominator",
            MetricError::AllPointsSkipped => "AllPointsSkipped",
            MetricError::GeometricMeanDomain { .. } => "GeometricMeanDomain",
            MetricError::HarmonicMeanDomain { .. } => "HarmonicMeanDomain",
            MetricError::EmptyAggregation => "EmptyAggregation",
            MetricError::SqrtDomain { .. } => "SqrtDomain",
            MetricError::LogDomain { .. } => "LogDomain",
            MetricError::InsufficientData { .. } => "InsufficientData",
            MetricError::UnknownMetric { .. } => "UnknownMetric",
            MetricError::RequiresBenchmark { .. } => "RequiresBenchmark",
            MetricError::MissingBenchmark { .. } => "MissingBenchmark",
            MetricError::BenchmarkMismatch { .. } => "BenchmarkMismatch",
            MetricError::Unimplemented { .. } => "Unimplemented",
            MetricError::UnsupportedVariant { .. } => "UnsupportedVariant",
            MetricError::DuplicateCellClaim { .. } => "DuplicateCellClaim",
            MetricError::InvalidSpec(_) => "InvalidSpec",
        }
    }
}
