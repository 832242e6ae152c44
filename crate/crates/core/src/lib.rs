//! Compositional error metrics for comparing predicted against actual
//! values. Every metric is built from a point distance, an optional
//! normalizer and an aggregator, so named metrics, ad-hoc compositions and
//! the typology chart all share one evaluator.
//!
//! ```
//! use typometrics::{evaluate_named, EvaluationPolicy, SeriesPair};
//!
//! let pair = SeriesPair::new(vec![2.0, 4.0, 6.0], vec![3.0, 3.0, 6.0]).unwrap();
//! let mae = evaluate_named(&pair, "MAE", &EvaluationPolicy::fail_fast(), None).unwrap();
//! assert!((mae.value - 2.0 / 3.0).abs() < 1e-15);
//! ```

pub mod chart;
pub mod derived;
pub mod error;
pub mod evaluator;
pub mod parallel;
pub mod registry;
pub mod types;

pub use chart::{blank_cells, build_chart, render_chart, BlankCell, ChartFormat, ChartGrid};
pub use derived::{
    builtin_suite, builtin_suites, evaluate_metric, evaluate_suite, BenchmarkInput,
    InSampleActuals, SuiteDefinition, SuiteMember,
};
pub use error::{MetricError, Result};
pub use evaluator::evaluate;
pub use registry::{
    evaluate_named, list_metrics, lookup, Category, MetricDefinition, Registry, Variant,
};
pub use types::{
    AggregatorKind, Cell, Dimension, DistanceKind, EpsilonRule, EvaluationPolicy, LogRatioPolicy,
    MetricComposition, MetricResult, NormalizerKind, NormalizerSpec, PointTransform, PostTransform,
    SeriesPair, ZeroDenominatorPolicy,
};
