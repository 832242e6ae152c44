//! Metrics built on top of primary metrics: post-aggregation normalization
//! (extended), ratios against a benchmark or naive forecast (composite),
//! and named suites reported side by side (hybrid).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MetricError, Result};
use crate::evaluator::evaluate;
use crate::parallel;
use crate::registry::{Category, Registry, Requirement, Variant};
use crate::types::{
    AggregatorKind, Dimension, DistanceKind, EvaluationPolicy, MetricComposition, MetricResult,
    NormalizerSpec, PostTransform, SeriesPair, NEAR_ZERO,
};

fn unitary(distance: DistanceKind, aggregator: AggregatorKind) -> MetricComposition {
    MetricComposition::new(distance, NormalizerSpec::unitary(), aggregator)
}

fn mae_comp() -> MetricComposition {
    unitary(DistanceKind::AbsoluteError, AggregatorKind::Mean)
}

fn mse_comp() -> MetricComposition {
    unitary(DistanceKind::SquaredError, AggregatorKind::Mean)
}

fn rmse_comp() -> MetricComposition {
    mse_comp().then(PostTransform::Sqrt)
}

fn nonzero(x: f64) -> Result<f64> {
    if x.abs() < NEAR_ZERO || !x.is_finite() {
        Err(MetricError::ZeroDenominator { index: None })
    } else {
        Ok(x)
    }
}

fn rescale(mut r: MetricResult, divisor: f64, dimension: Dimension) -> MetricResult {
    r.value /= divisor;
    r.dimension = dimension;
    r.degenerate = !r.policy_actions.is_empty() || !r.value.is_finite();
    r
}

/// Sample (n - 1) variance.
fn variance(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(MetricError::InsufficientData { needed: 2, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    Ok(values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtendedKind {
    #[serde(rename = "NRMSE_m")]
    NrmseMean,
    #[serde(rename = "NRMSE_sd")]
    NrmseSd,
    #[serde(rename = "NRMSE_mm")]
    NrmseRange,
    #[serde(rename = "NMSE")]
    Nmse,
}

impl ExtendedKind {
    pub fn abbreviation(self) -> &'static str {
        match self {
            ExtendedKind::NrmseMean => "NRMSE_m",
            ExtendedKind::NrmseSd => "NRMSE_sd",
            ExtendedKind::NrmseRange => "NRMSE_mm",
            ExtendedKind::Nmse => "NMSE",
        }
    }

    pub fn from_abbreviation(abbr: &str) -> Option<Self> {
        [Self::NrmseMean, Self::NrmseSd, Self::NrmseRange, Self::Nmse]
            .into_iter()
            .find(|k| k.abbreviation().eq_ignore_ascii_case(abbr))
    }
}

/// RMSE or MSE normalized after aggregation by a statistic of the actuals.
pub fn extended(
    pair: &SeriesPair,
    kind: ExtendedKind,
    policy: &EvaluationPolicy,
) -> Result<MetricResult> {
    let actuals = pair.actuals();
    match kind {
        ExtendedKind::NrmseMean => {
            let mean = nonzero(pair.mean_actual())?;
            Ok(rescale(
                evaluate(pair, &rmse_comp(), policy)?,
                mean,
                Dimension::Dimensionless,
            ))
        }
        ExtendedKind::NrmseSd => {
            let sd = nonzero(variance(actuals)?.sqrt())?;
            Ok(rescale(
                evaluate(pair, &rmse_comp(), policy)?,
                sd,
                Dimension::Dimensionless,
            ))
        }
        ExtendedKind::NrmseRange => {
            let (lo, hi) = actuals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                    (lo.min(*a), hi.max(*a))
                });
            let range = nonzero(hi - lo)?;
            Ok(rescale(
                evaluate(pair, &rmse_comp(), policy)?,
                range,
                Dimension::Dimensionless,
            ))
        }
        ExtendedKind::Nmse => {
            let var = nonzero(variance(actuals)?)?;
            Ok(rescale(
                evaluate(pair, &mse_comp(), policy)?,
                var,
                Dimension::Dimensionless,
            ))
        }
    }
}

/// Historical actuals preceding the evaluation window.
#[derive(Debug, Clone, PartialEq)]
pub struct InSampleActuals(Vec<f64>);

impl InSampleActuals {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(MetricError::InsufficientData {
                needed: 2,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(MetricError::NonFiniteValue { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Mean absolute first difference: the in-sample MAE of the naive
    /// one-step forecast.
    pub fn naive_mae(&self) -> f64 {
        let diffs = self.0.windows(2).map(|w| (w[1] - w[0]).abs());
        diffs.sum::<f64>() / (self.0.len() - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchmarkInput {
    /// A benchmark method's predictions on the same actuals.
    BenchmarkPair(SeriesPair),
    InSampleActuals(InSampleActuals),
}

/// MAE scaled by the in-sample naive-forecast MAE.
pub fn mase(
    pair: &SeriesPair,
    in_sample: &InSampleActuals,
    policy: &EvaluationPolicy,
) -> Result<MetricResult> {
    let q = nonzero(in_sample.naive_mae())?;
    Ok(rescale(
        evaluate(pair, &mae_comp(), policy)?,
        q,
        Dimension::Dimensionless,
    ))
}

/// Primary metric a relative metric compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeBase {
    #[serde(rename = "MAE")]
    Mae,
    #[serde(rename = "RMSE")]
    Rmse,
    #[serde(rename = "GMAE")]
    Gmae,
    #[serde(rename = "GRMSE")]
    Grmse,
}

impl RelativeBase {
    fn composition(self) -> MetricComposition {
        match self {
            RelativeBase::Mae => mae_comp(),
            RelativeBase::Rmse => rmse_comp(),
            RelativeBase::Gmae => {
                unitary(DistanceKind::AbsoluteError, AggregatorKind::GeometricMean)
            }
            RelativeBase::Grmse => {
                unitary(DistanceKind::SquaredError, AggregatorKind::GeometricMean)
                    .then(PostTransform::Sqrt)
            }
        }
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            RelativeBase::Mae => "MAE",
            RelativeBase::Rmse => "RMSE",
            RelativeBase::Gmae => "GMAE",
            RelativeBase::Grmse => "GRMSE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeForm {
    Ratio,
    LogRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeOutcome {
    pub result: MetricResult,
    /// Plain-language reading of the ratio, e.g. "20% higher than the benchmark".
    pub interpretation: String,
}

/// Reads a ratio of error values as a percentage difference.
pub fn interpret_ratio(ratio: f64) -> String {
    let pct = (ratio - 1.0) * 100.0;
    let rounded = (pct * 100.0).round() / 100.0;
    if rounded == 0.0 {
        return "equal to the benchmark".to_string();
    }
    let direction = if rounded > 0.0 { "higher" } else { "lower" };
    format!("{}% {direction} than the benchmark", rounded.abs())
}

/// `base(pair) / base(benchmark)`, or its natural log. With base MAE this is
/// RMAE, with RMSE RelRMSE (log form: LMR), with GRMSE RGRMSE.
pub fn relative_metric(
    pair: &SeriesPair,
    benchmark: &SeriesPair,
    base: RelativeBase,
    form: RelativeForm,
    policy: &EvaluationPolicy,
) -> Result<RelativeOutcome> {
    if benchmark.len() != pair.len() {
        return Err(MetricError::LengthMismatch {
            actual: pair.len(),
            predicted: benchmark.len(),
        });
    }
    if let Some(index) = pair
        .actuals()
        .iter()
        .zip(benchmark.actuals())
        .position(|(a, b)| a != b)
    {
        return Err(MetricError::BenchmarkMismatch { index });
    }
    let comp = base.composition();
    let ours = evaluate(pair, &comp, policy)?;
    let theirs = evaluate(benchmark, &comp, policy)?.value;
    let ratio = ours.value / nonzero(theirs)?;
    let value = match form {
        RelativeForm::Ratio => ratio,
        RelativeForm::LogRatio => {
            if ratio.is_nan() || ratio <= 0.0 {
                return Err(MetricError::LogDomain { value: ratio });
            }
            ratio.ln()
        }
    };
    let mut result = ours;
    result.value = value;
    result.dimension = Dimension::Dimensionless;
    result.degenerate = !result.policy_actions.is_empty() || !value.is_finite();
    Ok(RelativeOutcome {
        result,
        interpretation: interpret_ratio(ratio),
    })
}

/// 1 - SSE / TSS.
pub fn coefficient_of_determination(pair: &SeriesPair) -> Result<MetricResult> {
    let n = pair.len();
    if n < 2 {
        return Err(MetricError::InsufficientData { needed: 2, got: n });
    }
    let mean = pair.mean_actual();
    let tss: f64 = pair.actuals().iter().map(|a| (a - mean).powi(2)).sum();
    let sse: f64 = pair.iter().map(|(a, p)| (p - a).powi(2)).sum();
    let value = 1.0 - sse / nonzero(tss)?;
    Ok(MetricResult::clean(value, Dimension::Dimensionless, n))
}

/// A metric name with an optional variant, written `NAME` or `NAME:variant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SuiteMember {
    pub name: String,
    pub variant: Option<Variant>,
}

impl SuiteMember {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variant: None,
        }
    }
}

impl fmt::Display for SuiteMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Some(v) => write!(f, "{}:{v}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

impl FromStr for SuiteMember {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once(':') {
            Some((name, variant)) => Ok(Self {
                name: name.trim().to_string(),
                variant: Some(variant.parse()?),
            }),
            None if s.is_empty() => Err(MetricError::InvalidSpec("empty metric name".into())),
            None => Ok(Self::new(s)),
        }
    }
}

impl TryFrom<String> for SuiteMember {
    type Error = MetricError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SuiteMember> for String {
    fn from(m: SuiteMember) -> String {
        m.to_string()
    }
}

/// A named set of metrics reported together, never combined into one number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteDefinition {
    pub name: String,
    pub members: Vec<SuiteMember>,
    #[serde(default)]
    pub rationale: String,
}

impl SuiteDefinition {
    pub fn new(name: &str, members: &[&str], rationale: &str) -> Result<Self> {
        let suite = Self {
            name: name.to_string(),
            members: members.iter().map(|m| m.parse()).collect::<Result<_>>()?,
            rationale: rationale.to_string(),
        };
        suite.validate()?;
        Ok(suite)
    }

    /// Members must be distinct and known to the registry.
    pub fn validate(&self) -> Result<()> {
        let registry = Registry::global();
        let mut seen = Vec::new();
        for m in &self.members {
            let def = registry.lookup(&m.name)?;
            let key = (def.abbreviation, m.variant);
            if seen.contains(&key) {
                return Err(MetricError::InvalidSpec(format!(
                    "suite '{}' lists {} twice",
                    self.name, m
                )));
            }
            seen.push(key);
        }
        Ok(())
    }
}

pub fn builtin_suites() -> Vec<SuiteDefinition> {
    [
        (
            "bias-accuracy",
            &["ME", "MAE", "RMSE"][..],
            "signed bias next to absolute and outlier-sensitive accuracy",
        ),
        (
            "log-symmetric",
            &["MdLAR", "MdSA"][..],
            "median symmetric accuracy with the median log accuracy ratio as its signed bias companion",
        ),
        (
            "percentage",
            &["MAPE", "MdAPE", "sMAPE"][..],
            "scale-free percentage errors under mean, median and symmetric normalization",
        ),
    ]
    .into_iter()
    .map(|(name, members, why)| SuiteDefinition::new(name, members, why).expect("built-in suites are valid"))
    .collect()
}

pub fn builtin_suite(name: &str) -> Option<SuiteDefinition> {
    builtin_suites()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
}

fn find_benchmark(aux: &[BenchmarkInput]) -> Option<&SeriesPair> {
    aux.iter().find_map(|a| match a {
        BenchmarkInput::BenchmarkPair(p) => Some(p),
        _ => None,
    })
}

fn find_in_sample(aux: &[BenchmarkInput]) -> Option<&InSampleActuals> {
    aux.iter().find_map(|a| match a {
        BenchmarkInput::InSampleActuals(s) => Some(s),
        _ => None,
    })
}

/// Evaluates any catalogued metric by name, routing metrics that need a
/// benchmark or in-sample series to the matching entry point.
pub fn evaluate_metric(
    pair: &SeriesPair,
    member: &SuiteMember,
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> Result<MetricResult> {
    let registry = Registry::global();
    let def = registry.lookup(&member.name)?;
    let missing = |needed: &str| MetricError::MissingBenchmark {
        metric: def.abbreviation.into(),
        needed: needed.into(),
    };
    match def.requires {
        Requirement::None => {
            registry.evaluate_named(pair, def.abbreviation, policy, member.variant)
        }
        Requirement::InSampleActuals => {
            let in_sample = find_in_sample(aux).ok_or_else(|| missing("in-sample actuals"))?;
            mase(pair, in_sample, policy)
        }
        Requirement::BenchmarkPair => {
            let bench = find_benchmark(aux).ok_or_else(|| missing("benchmark predictions"))?;
            let (base, form) = match def.abbreviation {
                "RMAE" => (RelativeBase::Mae, RelativeForm::Ratio),
                "RelRMSE" => (RelativeBase::Rmse, RelativeForm::Ratio),
                "LMR" => (RelativeBase::Rmse, RelativeForm::LogRatio),
                "RGRMSE" => (RelativeBase::Grmse, RelativeForm::Ratio),
                other => {
                    return Err(MetricError::Unimplemented {
                        metric: other.into(),
                        reason: "no relative route".into(),
                    })
                }
            };
            Ok(relative_metric(pair, bench, base, form, policy)?.result)
        }
    }
}

/// Evaluates every suite member. Per-member failures are kept in place;
/// only a missing auxiliary input or an unknown member fails the call.
pub fn evaluate_suite(
    pair: &SeriesPair,
    suite: &SuiteDefinition,
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> Result<Vec<(String, Result<MetricResult>)>> {
    let registry = Registry::global();
    for m in &suite.members {
        let def = registry.lookup(&m.name)?;
        let present = match def.requires {
            Requirement::None => true,
            Requirement::InSampleActuals => find_in_sample(aux).is_some(),
            Requirement::BenchmarkPair => find_benchmark(aux).is_some(),
        };
        if !present {
            return Err(MetricError::MissingBenchmark {
                metric: def.abbreviation.into(),
                needed: match def.requires {
                    Requirement::InSampleActuals => "in-sample actuals".into(),
                    _ => "benchmark predictions".into(),
                },
            });
        }
    }
    let results = parallel::map(&suite.members, |m| evaluate_metric(pair, m, aux, policy));
    Ok(suite
        .members
        .iter()
        .map(ToString::to_string)
        .zip(results)
        .collect())
}

/// Registry hook: extended and self-contained composite metrics.
pub(crate) fn evaluate_derived(
    pair: &SeriesPair,
    abbreviation: &str,
    category: Category,
    policy: &EvaluationPolicy,
) -> Option<Result<MetricResult>> {
    match category {
        Category::Extended => {
            ExtendedKind::from_abbreviation(abbreviation).map(|k| extended(pair, k, policy))
        }
        Category::Composite if abbreviation == "CoD" => Some(coefficient_of_determination(pair)),
        _ => None,
    }
}
