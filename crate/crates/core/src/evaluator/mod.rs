//! The primary-metric pipeline:
//! distance -> normalize -> point transform -> aggregate -> post transforms.
//!
//! Every stage works on a [`PointVector`] aligned with the input pair so that
//! skipped points and policy interventions stay attributable to an index.

mod aggregate;

pub use aggregate::aggregate;

use crate::error::{MetricError, Result};
use crate::types::{
    DistanceKind, EvaluationPolicy, LogRatioPolicy, MetricComposition, MetricResult,
    NormalizerKind, NormalizerSpec, PointTransform, PolicyAction, PolicyActionKind, PostTransform,
    SeriesPair, ZeroDenominatorPolicy, NEAR_ZERO,
};

/// Per-point values with a usable mask and the policy actions that shaped it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVector {
    values: Vec<f64>,
    usable: Vec<bool>,
    actions: Vec<PolicyAction>,
}

impl PointVector {
    /// A fully usable vector, mostly for feeding [`aggregate`] directly.
    pub fn from_values(values: Vec<f64>) -> Self {
        let usable = vec![true; values.len()];
        Self {
            values,
            usable,
            actions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw values; entries at skipped indices are meaningless.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_usable(&self, index: usize) -> bool {
        self.usable[index]
    }

    pub fn usable_count(&self) -> usize {
        self.usable.iter().filter(|u| **u).count()
    }

    pub fn skipped_count(&self) -> usize {
        self.len() - self.usable_count()
    }

    pub fn actions(&self) -> &[PolicyAction] {
        &self.actions
    }

    /// `(index, value)` for every usable point.
    pub fn usable(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.usable)
            .enumerate()
            .filter(|(_, (_, u))| **u)
            .map(|(i, (v, _))| (i, *v))
    }

    fn skip(&mut self, index: usize, kind: PolicyActionKind) {
        self.usable[index] = false;
        self.values[index] = f64::NAN;
        self.actions.push(PolicyAction { index, kind });
    }

    fn ensure_some_usable(&self) -> Result<()> {
        if self.usable_count() == 0 {
            Err(MetricError::AllPointsSkipped)
        } else {
            Ok(())
        }
    }
}

/// Point distances D1..D5. Log distances consult the log-ratio policy at
/// indices where P/A is not positive.
pub fn point_distances(
    pair: &SeriesPair,
    kind: DistanceKind,
    policy: &EvaluationPolicy,
) -> Result<PointVector> {
    let mut out = PointVector::from_values(Vec::with_capacity(pair.len()));
    let mut bad = Vec::new();
    for (j, (a, p)) in pair.iter().enumerate() {
        let d = match kind {
            DistanceKind::Error => a - p,
            DistanceKind::AbsoluteError => (a - p).abs(),
            DistanceKind::SquaredError => (a - p) * (a - p),
            DistanceKind::LogQuotient | DistanceKind::AbsLogQuotient => {
                let ratio = p / a;
                if a == 0.0 || !ratio.is_finite() || ratio <= 0.0 {
                    bad.push(j);
                    f64::NAN
                } else if kind == DistanceKind::LogQuotient {
                    ratio.ln()
                } else {
                    ratio.ln().abs()
                }
            }
        };
        out.values.push(d);
        out.usable.push(true);
    }
    for j in bad {
        match policy.nonpositive_log_ratio {
            LogRatioPolicy::Fail => return Err(MetricError::NonpositiveLogRatio { index: j }),
            LogRatioPolicy::SkipPoint => out.skip(j, PolicyActionKind::SkippedNonpositiveLogRatio),
        }
    }
    out.ensure_some_usable()?;
    Ok(out)
}

fn normalizer_base(spec: &NormalizerSpec, a: f64, p: f64, mean_a: f64) -> f64 {
    let abs = spec.absolute_denominator;
    match spec.kind {
        NormalizerKind::Unitary => 1.0,
        NormalizerKind::ByActuals if abs => a.abs(),
        NormalizerKind::ByActuals => a,
        NormalizerKind::ByVariabilityOfActuals if abs => (a - mean_a).abs(),
        NormalizerKind::ByVariabilityOfActuals => a - mean_a,
        NormalizerKind::BySumActualPredicted if abs => a.abs() + p.abs(),
        NormalizerKind::BySumActualPredicted => a + p,
        NormalizerKind::ByMaxActualPredicted if abs => a.abs().max(p.abs()),
        NormalizerKind::ByMaxActualPredicted => a.max(p),
        NormalizerKind::ByMinActualPredicted if abs => a.abs().min(p.abs()),
        NormalizerKind::ByMinActualPredicted => a.min(p),
    }
}

/// Applies `factor * d_j / base_j^c` to every usable point. `c = -1`
/// multiplies by the base instead. Near-zero denominators go through the
/// zero-denominator policy.
pub fn normalize(
    points: PointVector,
    pair: &SeriesPair,
    spec: &NormalizerSpec,
    policy: &EvaluationPolicy,
) -> Result<PointVector> {
    spec.validate()?;
    let spec = spec.effective();
    if spec.kind == NormalizerKind::Unitary {
        return Ok(points);
    }
    let mut out = points;
    let mean_a = pair.mean_actual();
    let mut epsilon = None;

    for (j, (a, p)) in pair.iter().enumerate() {
        if !out.usable[j] {
            continue;
        }
        let mut base = normalizer_base(&spec, a, p, mean_a);
        if spec.exponent_c > 0 && base.abs() < NEAR_ZERO {
            match policy.zero_denominator {
                ZeroDenominatorPolicy::Fail => {
                    return Err(MetricError::ZeroDenominator { index: Some(j) })
                }
                ZeroDenominatorPolicy::SkipPoint => {
                    out.skip(j, PolicyActionKind::SkippedZeroDenominator);
                    continue;
                }
                ZeroDenominatorPolicy::EpsilonCorrect(rule) => {
                    let eps = match epsilon {
                        Some(e) => e,
                        None => *epsilon.insert(EvaluationPolicy::resolve_epsilon(rule, pair)?),
                    };
                    let corrected = base + eps;
                    out.actions.push(PolicyAction {
                        index: j,
                        kind: PolicyActionKind::EpsilonCorrected {
                            original: base,
                            corrected,
                        },
                    });
                    base = corrected;
                }
            }
        }
        let d = out.values[j];
        out.values[j] = match spec.exponent_c {
            -1 => spec.numerator_factor * d * base,
            1 => spec.numerator_factor * d / base,
            c => spec.numerator_factor * d / base.powi(c),
        };
    }
    out.ensure_some_usable()?;
    Ok(out)
}

/// Per-point transform applied after normalization.
pub fn apply_point_transform(
    points: PointVector,
    pair: &SeriesPair,
    t: PointTransform,
) -> PointVector {
    let mut out = points;
    match t {
        PointTransform::Identity => {}
        PointTransform::ExpMinusOne => {
            for j in 0..out.len() {
                if out.usable[j] {
                    out.values[j] = out.values[j].exp_m1();
                }
            }
        }
        PointTransform::SignedExpMinusOne => {
            for (j, (a, p)) in pair.iter().enumerate() {
                if out.usable[j] {
                    let diff = p - a;
                    let sign = if diff > 0.0 {
                        1.0
                    } else if diff < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    out.values[j] = sign * out.values[j].exp_m1();
                }
            }
        }
    }
    out
}

fn apply_post_transform(value: f64, t: PostTransform) -> Result<f64> {
    Ok(match t {
        PostTransform::Identity => value,
        PostTransform::Sqrt => {
            if value < 0.0 {
                return Err(MetricError::SqrtDomain { value });
            }
            value.sqrt()
        }
        PostTransform::Scale(k) => k * value,
        PostTransform::SymmetricAccuracy => 100.0 * value.exp_m1(),
    })
}

/// Runs the whole pipeline for one composition.
pub fn evaluate(
    pair: &SeriesPair,
    comp: &MetricComposition,
    policy: &EvaluationPolicy,
) -> Result<MetricResult> {
    comp.validate()?;
    let points = point_distances(pair, comp.distance, policy)?;
    let points = normalize(points, pair, &comp.normalizer, policy)?;
    let points = apply_point_transform(points, pair, comp.point_transform);
    let mut value = aggregate(&points, comp.aggregator)?;
    for t in &comp.post_transforms {
        value = apply_post_transform(value, *t)?;
    }
    let actions = points.actions().to_vec();
    Ok(MetricResult {
        value,
        dimension: comp.dimension(),
        points_total: points.len(),
        points_skipped: points.skipped_count(),
        degenerate: !actions.is_empty() || !value.is_finite(),
        policy_actions: actions,
    })
}
