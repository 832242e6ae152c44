//! Shared vocabulary: the validated series pair, the four components of a
//! primary metric and the knobs that govern degenerate inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MetricError, Result};

/// Denominators with magnitude below this are treated as zero.
pub const NEAR_ZERO: f64 = 1e-12;

/// Paired actual/predicted observations. Both sides have the same length,
/// at least one element, and contain only finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair {
    actuals: Vec<f64>,
    predicted: Vec<f64>,
}

/// Checks lengths and finiteness, reporting the first offending index.
pub fn validate_series_pair(actuals: &[f64], predicted: &[f64]) -> Result<SeriesPair> {
    SeriesPair::new(actuals.to_vec(), predicted.to_vec())
}

impl SeriesPair {
    pub fn new(actuals: Vec<f64>, predicted: Vec<f64>) -> Result<Self> {
        if actuals.len() != predicted.len() {
            return Err(MetricError::LengthMismatch {
                actual: actuals.len(),
                predicted: predicted.len(),
            });
        }
        if actuals.is_empty() {
            return Err(MetricError::EmptySeries);
        }
        if let Some(index) = actuals
            .iter()
            .zip(&predicted)
            .position(|(a, p)| !a.is_finite() || !p.is_finite())
        {
            return Err(MetricError::NonFiniteValue { index });
        }
        Ok(Self { actuals, predicted })
    }

    pub fn len(&self) -> usize {
        self.actuals.len()
    }

    /// Always false; a pair holds at least one observation.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn actuals(&self) -> &[f64] {
        &self.actuals
    }

    pub fn predicted(&self) -> &[f64] {
        &self.predicted
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.actuals
            .iter()
            .copied()
            .zip(self.predicted.iter().copied())
    }

    /// Ā, the arithmetic mean of the actuals.
    pub fn mean_actual(&self) -> f64 {
        self.actuals.iter().sum::<f64>() / self.len() as f64
    }

    /// The same observations with the roles of actual and predicted exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            actuals: self.predicted.clone(),
            predicted: self.actuals.clone(),
        }
    }

    /// Applies `x -> scale * x + shift` to both sides.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        let map = |v: &[f64]| v.iter().map(|x| scale * x + shift).collect();
        Self::new(map(&self.actuals), map(&self.predicted))
    }
}

/// How the discrepancy between one actual and one predicted value is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceKind {
    /// D1: A - P
    #[serde(rename = "D1")]
    Error,
    /// D2: |A - P|
    #[serde(rename = "D2")]
    AbsoluteError,
    /// D3: (A - P)^2
    #[serde(rename = "D3")]
    SquaredError,
    /// D4: ln(P / A)
    #[serde(rename = "D4")]
    LogQuotient,
    /// D5: |ln(P / A)|
    #[serde(rename = "D5")]
    AbsLogQuotient,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::Error,
        DistanceKind::AbsoluteError,
        DistanceKind::SquaredError,
        DistanceKind::LogQuotient,
        DistanceKind::AbsLogQuotient,
    ];

    pub fn code(self) -> &'static str {
        match self {
            DistanceKind::Error => "D1",
            DistanceKind::AbsoluteError => "D2",
            DistanceKind::SquaredError => "D3",
            DistanceKind::LogQuotient => "D4",
            DistanceKind::AbsLogQuotient => "D5",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DistanceKind::Error => "Error",
            DistanceKind::AbsoluteError => "Absolute error",
            DistanceKind::SquaredError => "Squared error",
            DistanceKind::LogQuotient => "Log quotient error",
            DistanceKind::AbsLogQuotient => "Absolute log quotient error",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            DistanceKind::Error => "(A_j - P_j)",
            DistanceKind::AbsoluteError => "|A_j - P_j|",
            DistanceKind::SquaredError => "(A_j - P_j)^2",
            DistanceKind::LogQuotient => "ln(P_j/A_j)",
            DistanceKind::AbsLogQuotient => "|ln(P_j/A_j)|",
        }
    }

    /// Power of the data unit carried by one point distance.
    pub(crate) fn unit_power(self) -> i32 {
        match self {
            DistanceKind::Error | DistanceKind::AbsoluteError => 1,
            DistanceKind::SquaredError => 2,
            DistanceKind::LogQuotient | DistanceKind::AbsLogQuotient => 0,
        }
    }

    pub fn uses_log(self) -> bool {
        matches!(
            self,
            DistanceKind::LogQuotient | DistanceKind::AbsLogQuotient
        )
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DistanceKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d1" | "error" | "e" => Ok(DistanceKind::Error),
            "d2" | "abs" | "absolute" | "absolute-error" => Ok(DistanceKind::AbsoluteError),
            "d3" | "squared" | "sq" | "squared-error" => Ok(DistanceKind::SquaredError),
            "d4" | "log" | "log-quotient" => Ok(DistanceKind::LogQuotient),
            "d5" | "abs-log" | "abs-log-quotient" => Ok(DistanceKind::AbsLogQuotient),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown distance '{other}'"
            ))),
        }
    }
}

/// Base of the per-point normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormalizerKind {
    /// N1: 1
    #[serde(rename = "N1")]
    Unitary,
    /// N2: A_j
    #[serde(rename = "N2")]
    ByActuals,
    /// N3: A_j - Ā
    #[serde(rename = "N3")]
    ByVariabilityOfActuals,
    /// N4: A_j + P_j
    #[serde(rename = "N4")]
    BySumActualPredicted,
    /// N5: max(A_j, P_j)
    #[serde(rename = "N5-max")]
    ByMaxActualPredicted,
    /// N5: min(A_j, P_j)
    #[serde(rename = "N5-min")]
    ByMinActualPredicted,
}

impl NormalizerKind {
    pub const ALL: [NormalizerKind; 6] = [
        NormalizerKind::Unitary,
        NormalizerKind::ByActuals,
        NormalizerKind::ByVariabilityOfActuals,
        NormalizerKind::BySumActualPredicted,
        NormalizerKind::ByMaxActualPredicted,
        NormalizerKind::ByMinActualPredicted,
    ];

    pub fn code(self) -> &'static str {
        match self {
            NormalizerKind::Unitary => "N1",
            NormalizerKind::ByActuals => "N2",
            NormalizerKind::ByVariabilityOfActuals => "N3",
            NormalizerKind::BySumActualPredicted => "N4",
            NormalizerKind::ByMaxActualPredicted => "N5-max",
            NormalizerKind::ByMinActualPredicted => "N5-min",
        }
    }

    /// Printed base of the denominator, `None` for the unitary normalizer.
    pub fn base_formula(self, absolute: bool) -> Option<&'static str> {
        Some(match (self, absolute) {
            (NormalizerKind::Unitary, _) => return None,
            (NormalizerKind::ByActuals, false) => "A_j",
            (NormalizerKind::ByActuals, true) => "|A_j|",
            (NormalizerKind::ByVariabilityOfActuals, false) => "(A_j - mean(A))",
            (NormalizerKind::ByVariabilityOfActuals, true) => "|A_j - mean(A)|",
            (NormalizerKind::BySumActualPredicted, false) => "(A_j + P_j)",
            (NormalizerKind::BySumActualPredicted, true) => "(|A_j| + |P_j|)",
            (NormalizerKind::ByMaxActualPredicted, false) => "max(A_j, P_j)",
            (NormalizerKind::ByMaxActualPredicted, true) => "max(|A_j|, |P_j|)",
            (NormalizerKind::ByMinActualPredicted, false) => "min(A_j, P_j)",
            (NormalizerKind::ByMinActualPredicted, true) => "min(|A_j|, |P_j|)",
        })
    }
}

impl fmt::Display for NormalizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for NormalizerKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n1" | "unitary" | "none" => Ok(NormalizerKind::Unitary),
            "n2" | "actuals" | "by-actuals" => Ok(NormalizerKind::ByActuals),
            "n3" | "variability" | "by-variability" => Ok(NormalizerKind::ByVariabilityOfActuals),
            "n4" | "sum" | "by-sum" => Ok(NormalizerKind::BySumActualPredicted),
            "n5" | "n5-max" | "max" | "by-max" => Ok(NormalizerKind::ByMaxActualPredicted),
            "n5-min" | "min" | "by-min" => Ok(NormalizerKind::ByMinActualPredicted),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown normalizer '{other}'"
            ))),
        }
    }
}

/// Per-point normalizer: `numerator_factor * d_j / base_j^exponent_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizerSpec {
    pub kind: NormalizerKind,
    #[serde(default = "one_i32")]
    pub exponent_c: i32,
    #[serde(default)]
    pub absolute_denominator: bool,
    #[serde(default = "one_f64")]
    pub numerator_factor: f64,
}

fn one_i32() -> i32 {
    1
}

fn one_f64() -> f64 {
    1.0
}

impl NormalizerSpec {
    pub const fn unitary() -> Self {
        Self {
            kind: NormalizerKind::Unitary,
            exponent_c: 1,
            absolute_denominator: false,
            numerator_factor: 1.0,
        }
    }

    pub fn new(kind: NormalizerKind, exponent_c: i32) -> Result<Self> {
        let spec = Self {
            kind,
            exponent_c,
            absolute_denominator: false,
            numerator_factor: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn absolute(mut self) -> Self {
        self.absolute_denominator = true;
        self
    }

    pub fn with_factor(mut self, factor: f64) -> Self {
        self.numerator_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.exponent_c, -1 | 1 | 2) {
            return Err(MetricError::InvalidSpec(format!(
                "normalizer exponent must be -1, 1 or 2, got {}",
                self.exponent_c
            )));
        }
        if !self.numerator_factor.is_finite() {
            return Err(MetricError::InvalidSpec(
                "numerator factor must be finite".into(),
            ));
        }
        Ok(())
    }

    /// The spec with unitary normalizers collapsed to their neutral settings.
    pub fn effective(&self) -> Self {
        if self.kind == NormalizerKind::Unitary {
            Self::unitary()
        } else {
            *self
        }
    }
}

impl Default for NormalizerSpec {
    fn default() -> Self {
        Self::unitary()
    }
}

/// Reduction of the per-point values to a single number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fraction")]
pub enum AggregatorKind {
    #[serde(rename = "G1")]
    Mean,
    #[serde(rename = "G2")]
    Median,
    #[serde(rename = "G3")]
    GeometricMean,
    #[serde(rename = "G4")]
    Sum,
    #[serde(rename = "max")]
    Maximum,
    #[serde(rename = "harmonic")]
    HarmonicMean,
    /// Drops `floor(fraction * m)` values from each end.
    #[serde(rename = "trimmed")]
    TruncatedMean(f64),
    /// Clamps `floor(fraction * m)` values at each end to the nearest kept value.
    #[serde(rename = "winsorized")]
    WinsorizedMean(f64),
}

impl AggregatorKind {
    /// The four aggregators that make up the rows of the typology chart.
    pub const CORE: [AggregatorKind; 4] = [
        AggregatorKind::Mean,
        AggregatorKind::Median,
        AggregatorKind::GeometricMean,
        AggregatorKind::Sum,
    ];

    pub fn is_core(self) -> bool {
        self.core_index().is_some()
    }

    pub fn core_index(self) -> Option<usize> {
        match self {
            AggregatorKind::Mean => Some(0),
            AggregatorKind::Median => Some(1),
            AggregatorKind::GeometricMean => Some(2),
            AggregatorKind::Sum => Some(3),
            _ => None,
        }
    }

    pub fn code(self) -> String {
        match self {
            AggregatorKind::Mean => "G1".into(),
            AggregatorKind::Median => "G2".into(),
            AggregatorKind::GeometricMean => "G3".into(),
            AggregatorKind::Sum => "G4".into(),
            AggregatorKind::Maximum => "max".into(),
            AggregatorKind::HarmonicMean => "harmonic".into(),
            AggregatorKind::TruncatedMean(f) => format!("trimmed:{f}"),
            AggregatorKind::WinsorizedMean(f) => format!("winsorized:{f}"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AggregatorKind::Mean => "Mean",
            AggregatorKind::Median => "Median",
            AggregatorKind::GeometricMean => "Geometric Mean",
            AggregatorKind::Sum => "Sum",
            AggregatorKind::Maximum => "Maximum",
            AggregatorKind::HarmonicMean => "Harmonic Mean",
            AggregatorKind::TruncatedMean(_) => "Truncated Mean",
            AggregatorKind::WinsorizedMean(_) => "Winsorized Mean",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AggregatorKind::TruncatedMean(f) | AggregatorKind::WinsorizedMean(f)
                if !(0.0..0.5).contains(&f) =>
            {
                Err(MetricError::InvalidSpec(format!(
                    "trimming fraction must lie in [0, 0.5), got {f}"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AggregatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl FromStr for AggregatorKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (lower.as_str(), None),
        };
        let fraction = || -> Result<f64> {
            arg.ok_or_else(|| {
                MetricError::InvalidSpec(format!("'{head}' needs a fraction, e.g. {head}:0.1"))
            })?
            .parse::<f64>()
            .map_err(|e| MetricError::InvalidSpec(format!("bad fraction: {e}")))
        };
        let kind = match head {
            "g1" | "mean" => AggregatorKind::Mean,
            "g2" | "median" => AggregatorKind::Median,
            "g3" | "geomean" | "geometric" => AggregatorKind::GeometricMean,
            "g4" | "sum" => AggregatorKind::Sum,
            "max" | "maximum" => AggregatorKind::Maximum,
            "harmonic" | "hmean" => AggregatorKind::HarmonicMean,
            "trimmed" | "truncated" => AggregatorKind::TruncatedMean(fraction()?),
            "winsorized" => AggregatorKind::WinsorizedMean(fraction()?),
            other => {
                return Err(MetricError::InvalidSpec(format!(
                    "unknown aggregator '{other}'"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Applied to each normalized point before aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PointTransform {
    #[default]
    Identity,
    /// x -> exp(x) - 1
    ExpMinusOne,
    /// x -> sign(P_j - A_j) * (exp(x) - 1), with sign(0) = 0
    SignedExpMinusOne,
}

impl FromStr for PointTransform {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(PointTransform::Identity),
            "expm1" | "exp-minus-one" => Ok(PointTransform::ExpMinusOne),
            "signed-expm1" | "signed-exp-minus-one" => Ok(PointTransform::SignedExpMinusOne),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown point transform '{other}'"
            ))),
        }
    }
}

/// Applied once to the aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PostTransform {
    Identity,
    Sqrt,
    Scale(f64),
    /// x -> 100 * (exp(x) - 1)
    SymmetricAccuracy,
}

impl fmt::Display for PostTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PostTransform::Identity => f.write_str("identity"),
            PostTransform::Sqrt => f.write_str("sqrt"),
            PostTransform::Scale(k) => write!(f, "scale:{k}"),
            PostTransform::SymmetricAccuracy => f.write_str("symmetric-accuracy"),
        }
    }
}

impl FromStr for PostTransform {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(k) = lower.strip_prefix("scale:") {
            let k = k
                .parse::<f64>()
                .map_err(|e| MetricError::InvalidSpec(format!("bad scale factor: {e}")))?;
            return Ok(PostTransform::Scale(k));
        }
        match lower.as_str() {
            "identity" | "none" => Ok(PostTransform::Identity),
            "sqrt" | "root" => Ok(PostTransform::Sqrt),
            "percent" => Ok(PostTransform::Scale(100.0)),
            "symmetric-accuracy" | "sa" => Ok(PostTransform::SymmetricAccuracy),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown post transform '{other}'"
            ))),
        }
    }
}

/// A full primary-metric recipe: aggregate(normalize(distance(A, P))).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComposition {
    pub distance: DistanceKind,
    pub normalizer: NormalizerSpec,
    pub aggregator: AggregatorKind,
    #[serde(default)]
    pub point_transform: PointTransform,
    #[serde(default)]
    pub post_transforms: Vec<PostTransform>,
}

/// Position of a composition in the distance x normalizer x aggregator grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub distance: DistanceKind,
    pub normalizer: NormalizerKind,
    pub aggregator: AggregatorKind,
}

impl Cell {
    pub const fn new(
        distance: DistanceKind,
        normalizer: NormalizerKind,
        aggregator: AggregatorKind,
    ) -> Self {
        Self {
            distance,
            normalizer,
            aggregator,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.distance, self.normalizer, self.aggregator
        )
    }
}

/// Accepts the display form, with or without parentheses: `D2,N2,G2`.
impl FromStr for Cell {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [d, n, g] = parts[..] else {
            return Err(MetricError::InvalidSpec(format!(
                "expected 'D,N,G', got '{s}'"
            )));
        };
        Ok(Cell::new(d.parse()?, n.parse()?, g.parse()?))
    }
}

impl MetricComposition {
    pub fn new(
        distance: DistanceKind,
        normalizer: NormalizerSpec,
        aggregator: AggregatorKind,
    ) -> Self {
        Self {
            distance,
            normalizer,
            aggregator,
            point_transform: PointTransform::Identity,
            post_transforms: Vec::new(),
        }
    }

    pub fn with_point_transform(mut self, t: PointTransform) -> Self {
        self.point_transform = t;
        self
    }

    pub fn then(mut self, t: PostTransform) -> Self {
        self.post_transforms.push(t);
        self
    }

    pub fn cell(&self) -> Cell {
        Cell::new(self.distance, self.normalizer.kind, self.aggregator)
    }

    pub fn validate(&self) -> Result<()> {
        self.normalizer.validate()?;
        self.aggregator.validate()?;
        if self.post_transforms.len() > 2 {
            return Err(MetricError::InvalidSpec(
                "at most two post transforms may follow the aggregation".into(),
            ));
        }
        Ok(())
    }

    /// Dimension of the final value, derived from the unit powers of the
    /// distance and normalizer and the post transforms.
    pub fn dimension(&self) -> Dimension {
        let norm = self.normalizer.effective();
        // tracked in half-powers so that a square root stays integral
        let mut half_power = 2 * self.distance.unit_power();
        if norm.kind != NormalizerKind::Unitary {
            half_power -= 2 * norm.exponent_c;
        }
        let mut percent = false;
        for t in &self.post_transforms {
            match t {
                PostTransform::Sqrt => {
                    if half_power % 2 != 0 {
                        return Dimension::Other;
                    }
                    half_power /= 2;
                }
                PostTransform::Scale(k) if *k == 100.0 && half_power == 0 => percent = true,
                PostTransform::SymmetricAccuracy => return Dimension::Percent,
                _ => {}
            }
        }
        match half_power {
            0 if percent => Dimension::Percent,
            0 => Dimension::Dimensionless,
            2 => Dimension::SameAsData,
            4 => Dimension::SquaredData,
            _ => Dimension::Other,
        }
    }
}

impl fmt::Display for MetricComposition {
    /// Renders the key=value descriptor accepted by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalizer;
        write!(
            f,
            "distance={} normalizer={} c={} abs={} factor={} aggregator={}",
            self.distance,
            n.kind,
            n.exponent_c,
            n.absolute_denominator,
            n.numerator_factor,
            self.aggregator
        )?;
        match self.point_transform {
            PointTransform::Identity => {}
            PointTransform::ExpMinusOne => f.write_str(" point=expm1")?,
            PointTransform::SignedExpMinusOne => f.write_str(" point=signed-expm1")?,
        }
        if !self.post_transforms.is_empty() {
            let post: Vec<String> = self
                .post_transforms
                .iter()
                .map(ToString::to_string)
                .collect();
            write!(f, " post={}", post.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for MetricComposition {
    type Err = MetricError;

    /// Parses a whitespace-separated `key=value` descriptor such as
    /// `distance=D4 normalizer=N1 aggregator=G1`. Keys: `distance`,
    /// `normalizer`, `aggregator`, `c`, `abs`, `factor`, `point`, `post`
    /// (comma-separated list).
    fn from_str(s: &str) -> Result<Self> {
        let mut distance = None;
        let mut kind = NormalizerKind::Unitary;
        let mut aggregator = None;
        let mut exponent_c = 1;
        let mut absolute = false;
        let mut factor = 1.0;
        let mut point = PointTransform::Identity;
        let mut post = Vec::new();

        for token in s.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| {
                MetricError::InvalidSpec(format!("expected key=value, got '{token}'"))
            })?;
            let bad = |e: &dyn fmt::Display| MetricError::InvalidSpec(format!("{key}: {e}"));
            match key.to_ascii_lowercase().as_str() {
                "distance" | "d" => distance = Some(value.parse()?),
                "normalizer" | "n" => kind = value.parse()?,
                "aggregator" | "g" => aggregator = Some(value.parse()?),
                "c" | "exponent" => exponent_c = value.parse().map_err(|e| bad(&e))?,
                "abs" => absolute = value.parse().map_err(|e| bad(&e))?,
                "factor" => factor = value.parse().map_err(|e| bad(&e))?,
                "point" => point = value.parse()?,
                "post" => {
                    for item in value.split(',').filter(|v| !v.is_empty()) {
                        post.push(item.parse()?);
                    }
                }
                other => return Err(MetricError::InvalidSpec(format!("unknown key '{other}'"))),
            }
        }

        let comp = MetricComposition {
            distance: distance
                .ok_or_else(|| MetricError::InvalidSpec("missing distance=".into()))?,
            normalizer: NormalizerSpec {
                kind,
                exponent_c,
                absolute_denominator: absolute,
                numerator_factor: factor,
            },
            aggregator: aggregator
                .ok_or_else(|| MetricError::InvalidSpec("missing aggregator=".into()))?,
            point_transform: point,
            post_transforms: post,
        };
        comp.validate()?;
        Ok(comp)
    }
}

/// Unit class of a metric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    SameAsData,
    SquaredData,
    Dimensionless,
    Percent,
    Other,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::SameAsData => "same-as-data",
            Dimension::SquaredData => "squared-data",
            Dimension::Dimensionless => "dimensionless",
            Dimension::Percent => "percent",
            Dimension::Other => "other",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonRule {
    FixedValue(f64),
    #[default]
    SmallestNonzeroActual,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroDenominatorPolicy {
    #[default]
    Fail,
    SkipPoint,
    /// Add a small positive value to near-zero denominators.
    EpsilonCorrect(EpsilonRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogRatioPolicy {
    #[default]
    Fail,
    SkipPoint,
}

/// Handling of degenerate points. A zero or negative factor in a geometric
/// mean always fails and has no knob here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationPolicy {
    pub zero_denominator: ZeroDenominatorPolicy,
    pub nonpositive_log_ratio: LogRatioPolicy,
}

impl EvaluationPolicy {
    pub fn fail_fast() -> Self {
        Self::default()
    }

    pub fn skipping() -> Self {
        Self {
            zero_denominator: ZeroDenominatorPolicy::SkipPoint,
            nonpositive_log_ratio: LogRatioPolicy::SkipPoint,
        }
    }

    pub fn epsilon(rule: EpsilonRule) -> Self {
        Self {
            zero_denominator: ZeroDenominatorPolicy::EpsilonCorrect(rule),
            ..Self::default()
        }
    }

    /// Resolves the epsilon added to a near-zero denominator.
    pub fn resolve_epsilon(rule: EpsilonRule, pair: &SeriesPair) -> Result<f64> {
        match rule {
            EpsilonRule::FixedValue(v) if v > 0.0 && v.is_finite() => Ok(v),
            EpsilonRule::FixedValue(v) => Err(MetricError::InvalidSpec(format!(
                "epsilon must be positive and finite, got {v}"
            ))),
            EpsilonRule::SmallestNonzeroActual => pair
                .actuals()
                .iter()
                .map(|a| a.abs())
                .filter(|a| *a >= NEAR_ZERO)
                .min_by(f64::total_cmp)
                .ok_or(MetricError::ZeroDenominator { index: None }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum PolicyActionKind {
    SkippedZeroDenominator,
    SkippedNonpositiveLogRatio,
    EpsilonCorrected { original: f64, corrected: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyAction {
    pub index: usize,
    #[serde(flatten)]
    pub kind: PolicyActionKind,
}

/// A metric value with the diagnostics gathered while computing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult {
    pub value: f64,
    pub dimension: Dimension,
    pub points_total: usize,
    pub points_skipped: usize,
    pub policy_actions: Vec<PolicyAction>,
    pub degenerate: bool,
}

impl MetricResult {
    /// A result computed from all `points_total` points with no policy intervention.
    pub fn clean(value: f64, dimension: Dimension, points_total: usize) -> Self {
        Self {
            value,
            dimension,
            points_total,
            points_skipped: 0,
            policy_actions: Vec::new(),
            degenerate: !value.is_finite(),
        }
    }

    pub fn points_used(&self) -> usize {
        self.points_total - self.points_skipped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_matching_pair() {
        let pair = validate_series_pair(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pair.len(), 3);
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = validate_series_pair(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert_eq!(
            err,
            MetricError::LengthMismatch {
                actual: 2,
                predicted: 3
            }
        );
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(
            validate_series_pair(&[], &[]).unwrap_err(),
            MetricError::EmptySeries
        );
    }

    #[test]
    fn names_first_nonfinite_index() {
        let err = validate_series_pair(&[1.0, f64::NAN], &[1.0, 2.0]).unwrap_err();
        assert_eq!(err, MetricError::NonFiniteValue { index: 1 });
        let err =
            validate_series_pair(&[1.0, 2.0, 3.0], &[1.0, f64::INFINITY, f64::NAN]).unwrap_err();
        assert_eq!(err, MetricError::NonFiniteValue { index: 1 });
    }

    #[test]
    fn exponent_outside_allowed_set_is_rejected() {
        assert!(NormalizerSpec::new(NormalizerKind::ByActuals, 3).is_err());
        assert!(NormalizerSpec::new(NormalizerKind::ByActuals, 0).is_err());
        assert!(NormalizerSpec::new(NormalizerKind::ByActuals, -1).is_ok());
    }

    #[test]
    fn unitary_ignores_settings() {
        let spec = NormalizerSpec {
            kind: NormalizerKind::Unitary,
            exponent_c: 2,
            absolute_denominator: true,
            numerator_factor: 2.0,
        };
        assert_eq!(spec.effective(), NormalizerSpec::unitary());
    }

    #[test]
    fn trim_fraction_bounds() {
        assert!(AggregatorKind::TruncatedMean(0.5).validate().is_err());
        assert!(AggregatorKind::WinsorizedMean(-0.1).validate().is_err());
        assert!(AggregatorKind::TruncatedMean(0.0).validate().is_ok());
        assert!("trimmed:0.6".parse::<AggregatorKind>().is_err());
        assert_eq!(
            "winsorized:0.2".parse::<AggregatorKind>().unwrap(),
            AggregatorKind::WinsorizedMean(0.2)
        );
    }

    #[test]
    fn dimension_rules() {
        let mae = MetricComposition::new(
            DistanceKind::AbsoluteError,
            NormalizerSpec::unitary(),
            AggregatorKind::Mean,
        );
        assert_eq!(mae.dimension(), Dimension::SameAsData);
        let mse = MetricComposition::new(
            DistanceKind::SquaredError,
            NormalizerSpec::unitary(),
            AggregatorKind::Mean,
        );
        assert_eq!(mse.dimension(), Dimension::SquaredData);
        assert_eq!(
            mse.clone().then(PostTransform::Sqrt).dimension(),
            Dimension::SameAsData
        );
        let mare = MetricComposition::new(
            DistanceKind::AbsoluteError,
            NormalizerSpec::new(NormalizerKind::ByActuals, 1)
                .unwrap()
                .absolute(),
            AggregatorKind::Mean,
        );
        assert_eq!(mare.dimension(), Dimension::Dimensionless);
        assert_eq!(
            mare.then(PostTransform::Scale(100.0)).dimension(),
            Dimension::Percent
        );
        let ncsd = MetricComposition::new(
            DistanceKind::SquaredError,
            NormalizerSpec::new(NormalizerKind::ByActuals, 1).unwrap(),
            AggregatorKind::Sum,
        );
        assert_eq!(ncsd.dimension(), Dimension::SameAsData);
        let mdsa = MetricComposition::new(
            DistanceKind::AbsLogQuotient,
            NormalizerSpec::unitary(),
            AggregatorKind::Median,
        )
        .then(PostTransform::SymmetricAccuracy);
        assert_eq!(mdsa.dimension(), Dimension::Percent);
    }

    #[test]
    fn descriptor_parses_blank_cell_request() {
        let comp: MetricComposition = "distance=D4 normalizer=N1 aggregator=G1".parse().unwrap();
        assert_eq!(
            comp.cell(),
            Cell::new(
                DistanceKind::LogQuotient,
                NormalizerKind::Unitary,
                AggregatorKind::Mean
            )
        );
        assert!(comp.post_transforms.is_empty());
    }

    #[test]
    fn descriptor_round_trips_through_display() {
        let comp: MetricComposition =
            "distance=D2 normalizer=N4 c=1 abs=true factor=2 aggregator=G1 post=scale:100"
                .parse()
                .unwrap();
        let again: MetricComposition = comp.to_string().parse().unwrap();
        assert_eq!(comp, again);
    }

    #[test]
    fn descriptor_errors() {
        assert!("distance=D9 aggregator=G1"
            .parse::<MetricComposition>()
            .is_err());
        assert!("aggregator=G1".parse::<MetricComposition>().is_err());
        assert!("distance=D1 aggregator=G1 post=sqrt,sqrt,sqrt"
            .parse::<MetricComposition>()
            .is_err());
        assert!("distance=D1 aggregator=G1 c=5 normalizer=N2"
            .parse::<MetricComposition>()
            .is_err());
        assert!("distance D1".parse::<MetricComposition>().is_err());
    }

    #[test]
    fn smallest_nonzero_actual_epsilon() {
        let pair = SeriesPair::new(vec![0.0, 2.0, -0.5, 4.0], vec![1.0; 4]).unwrap();
        assert_eq!(
            EvaluationPolicy::resolve_epsilon(EpsilonRule::SmallestNonzeroActual, &pair).unwrap(),
            0.5
        );
        let zeros = SeriesPair::new(vec![0.0, 0.0], vec![1.0; 2]).unwrap();
        assert!(
            EvaluationPolicy::resolve_epsilon(EpsilonRule::SmallestNonzeroActual, &zeros).is_err()
        );
        assert!(EvaluationPolicy::resolve_epsilon(EpsilonRule::FixedValue(0.0), &pair).is_err());
    }
}
