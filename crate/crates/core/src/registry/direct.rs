//! Closed-form definitions of every catalogued metric, written out term by
//! term. Nothing here goes through the composition pipeline, so these
//! serve as the independent check on it.

use super::Variant;
use crate::error::{MetricError, Result};
use crate::types::{
    EvaluationPolicy, LogRatioPolicy, PolicyAction, PolicyActionKind, SeriesPair,
    ZeroDenominatorPolicy, NEAR_ZERO,
};

/// Value of a direct formula plus what the policy did along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectOutcome {
    pub value: f64,
    pub skipped: usize,
    pub actions: Vec<PolicyAction>,
}

pub type DirectFormula =
    fn(&SeriesPair, &EvaluationPolicy, Option<Variant>) -> Result<DirectOutcome>;

/// One summand before the policy has had its say.
enum Term {
    /// `num / den`; `den` is checked against the zero-denominator policy.
    Ratio { num: f64, den: f64 },
    /// `num / den^2`, checked on `den`.
    RatioSq { num: f64, den: f64 },
    /// `weight * ln(ratio)`; `ratio` must be positive.
    WeightedLog { weight: f64, ratio: f64 },
    /// Applies `f` to `ln(ratio)`; `ratio` must be positive.
    LogThen {
        ratio: f64,
        f: fn(f64, f64, f64) -> f64,
        a: f64,
        p: f64,
    },
}

struct Terms {
    kept: Vec<f64>,
    skipped: usize,
    actions: Vec<PolicyAction>,
}

impl Terms {
    fn finish(self, value: f64) -> DirectOutcome {
        DirectOutcome {
            value,
            skipped: self.skipped,
            actions: self.actions,
        }
    }
}

fn collect(
    pair: &SeriesPair,
    policy: &EvaluationPolicy,
    term: impl Fn(f64, f64) -> Term,
) -> Result<Terms> {
    let mut out = Terms {
        kept: Vec::with_capacity(pair.len()),
        skipped: 0,
        actions: Vec::new(),
    };
    let mut epsilon = None;
    for (j, (a, p)) in pair.iter().enumerate() {
        let (num, den, squared) = match term(a, p) {
            Term::WeightedLog { weight, ratio } => {
                if log_ok(ratio, j, policy, &mut out)? {
                    out.kept.push(weight * ratio.ln());
                }
                continue;
            }
            Term::LogThen { ratio, f, a, p } => {
                if log_ok(ratio, j, policy, &mut out)? {
                    out.kept.push(f(ratio.ln(), a, p));
                }
                continue;
            }
            Term::Ratio { num, den } => (num, den, false),
            Term::RatioSq { num, den } => (num, den, true),
        };
        let mut den = den;
        if den.abs() < NEAR_ZERO {
            match policy.zero_denominator {
                ZeroDenominatorPolicy::Fail => {
                    return Err(MetricError::ZeroDenominator { index: Some(j) })
                }
                ZeroDenominatorPolicy::SkipPoint => {
                    out.skipped += 1;
                    out.actions.push(PolicyAction {
                        index: j,
                        kind: PolicyActionKind::SkippedZeroDenominator,
                    });
                    continue;
                }
                ZeroDenominatorPolicy::EpsilonCorrect(rule) => {
                    if epsilon.is_none() {
                        epsilon = Some(EvaluationPolicy::resolve_epsilon(rule, pair)?);
                    }
                    let corrected = den + epsilon.unwrap_or_default();
                    out.actions.push(PolicyAction {
                        index: j,
                        kind: PolicyActionKind::EpsilonCorrected {
                            original: den,
                            corrected,
                        },
                    });
                    den = corrected;
                }
            }
        }
        out.kept.push(if squared {
            num / (den * den)
        } else {
            num / den
        });
    }
    if out.kept.is_empty() {
        return Err(MetricError::AllPointsSkipped);
    }
    Ok(out)
}

fn log_ok(ratio: f64, j: usize, policy: &EvaluationPolicy, out: &mut Terms) -> Result<bool> {
    if ratio > 0.0 && ratio.is_finite() {
        return Ok(true);
    }
    match policy.nonpositive_log_ratio {
        LogRatioPolicy::Fail => Err(MetricError::NonpositiveLogRatio { index: j }),
        LogRatioPolicy::SkipPoint => {
            out.skipped += 1;
            out.actions.push(PolicyAction {
                index: j,
                kind: PolicyActionKind::SkippedNonpositiveLogRatio,
            });
            Ok(false)
        }
    }
}

fn sum(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc + x)
}

fn mean(v: &[f64]) -> f64 {
    sum(v) / v.len() as f64
}

/// Median by selection rather than a full sort.
fn median(v: &[f64]) -> f64 {
    let mut w = v.to_vec();
    let n = w.len();
    let hi = n / 2;
    let (lower, upper, _) = w.select_nth_unstable_by(hi, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower_max + upper) / 2.0
    }
}

/// exp of the mean log, after checking every factor is positive.
fn geometric(v: &[f64]) -> Result<f64> {
    if let Some(index) = v.iter().position(|x| *x <= 0.0) {
        return Err(MetricError::GeometricMeanDomain { index });
    }
    Ok((sum(&v.iter().map(|x| x.ln()).collect::<Vec<_>>()) / v.len() as f64).exp())
}

fn root(x: f64) -> Result<f64> {
    if x < 0.0 {
        Err(MetricError::SqrtDomain { value: x })
    } else {
        Ok(x.sqrt())
    }
}

fn bad_variant(metric: &str, v: Variant) -> MetricError {
    MetricError::UnsupportedVariant {
        metric: metric.into(),
        variant: v.to_string(),
    }
}

fn err(a: f64, p: f64) -> f64 {
    a - p
}

fn plain(pair: &SeriesPair, f: impl Fn(f64, f64) -> f64) -> Terms {
    Terms {
        kept: pair.iter().map(|(a, p)| f(a, p)).collect(),
        skipped: 0,
        actions: Vec::new(),
    }
}

// --- signed error -------------------------------------------------------

pub fn me(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, err);
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn mnb(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio { num: a - p, den: a })?;
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn mpe(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio { num: a - p, den: a })?;
    let v = 100.0 * sum(&t.kept) / t.kept.len() as f64;
    Ok(t.finish(v))
}

pub fn fb(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: 2.0 * (a - p),
        den: a + p,
    })?;
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn md(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, err);
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

// --- absolute error -----------------------------------------------------

pub fn mae(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).abs());
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn mdae(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).abs());
    let v = median(&t.kept);
    Ok(t.finish(v))
}

pub fn maxae(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).abs());
    let v = t.kept.iter().copied().fold(0.0, f64::max);
    Ok(t.finish(v))
}

pub fn mare(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: a.abs(),
    })?;
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn mape(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: a.abs(),
    })?;
    let v = 100.0 / t.kept.len() as f64 * sum(&t.kept);
    Ok(t.finish(v))
}

pub fn mdape(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: a.abs(),
    })?;
    let v = 100.0 * median(&t.kept);
    Ok(t.finish(v))
}

fn relative_abs_terms(pair: &SeriesPair, pol: &EvaluationPolicy) -> Result<Terms> {
    let mean_a = pair.mean_actual();
    collect(pair, pol, move |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: (a - mean_a).abs(),
    })
}

/// Σ|e_j| and Σ|A_j - Ā| for the ratio-of-aggregates forms.
fn abs_totals(pair: &SeriesPair) -> Result<(f64, f64)> {
    let mean_a = pair.mean_actual();
    let num = sum(&pair.iter().map(|(a, p)| (a - p).abs()).collect::<Vec<_>>());
    let den = sum(&pair
        .actuals()
        .iter()
        .map(|a| (a - mean_a).abs())
        .collect::<Vec<_>>());
    if den.abs() < NEAR_ZERO {
        return Err(MetricError::ZeroDenominator { index: None });
    }
    Ok((num, den))
}

fn sq_totals(pair: &SeriesPair) -> Result<(f64, f64)> {
    let mean_a = pair.mean_actual();
    let num = sum(&pair
        .iter()
        .map(|(a, p)| (a - p) * (a - p))
        .collect::<Vec<_>>());
    let den = sum(&pair
        .actuals()
        .iter()
        .map(|a| (a - mean_a) * (a - mean_a))
        .collect::<Vec<_>>());
    if den.abs() < NEAR_ZERO {
        return Err(MetricError::ZeroDenominator { index: None });
    }
    Ok((num, den))
}

/// Outcome of a formula that never consults the per-point policy.
fn whole(value: f64) -> DirectOutcome {
    DirectOutcome {
        value,
        skipped: 0,
        actions: Vec::new(),
    }
}

pub fn rae(pair: &SeriesPair, pol: &EvaluationPolicy, v: Option<Variant>) -> Result<DirectOutcome> {
    match v.unwrap_or(Variant::Option1) {
        Variant::Option1 => {
            let t = relative_abs_terms(pair, pol)?;
            let v = sum(&t.kept);
            Ok(t.finish(v))
        }
        Variant::Option2 => {
            let (num, den) = abs_totals(pair)?;
            Ok(whole(num / den))
        }
        other => Err(bad_variant("RAE", other)),
    }
}

pub fn mrae(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    match v.unwrap_or(Variant::Option1) {
        Variant::Option1 => {
            let t = relative_abs_terms(pair, pol)?;
            let v = mean(&t.kept);
            Ok(t.finish(v))
        }
        Variant::Option2 => {
            let (num, den) = abs_totals(pair)?;
            Ok(whole(num / (pair.len() as f64 * den)))
        }
        other => Err(bad_variant("MRAE", other)),
    }
}

pub fn mdrae(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = relative_abs_terms(pair, pol)?;
    let v = median(&t.kept);
    Ok(t.finish(v))
}

pub fn gmrae(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = relative_abs_terms(pair, pol)?;
    let v = geometric(&t.kept)?;
    Ok(t.finish(v))
}

pub fn gmae(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).abs());
    let v = geometric(&t.kept)?;
    Ok(t.finish(v))
}

pub fn sad(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).abs());
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn whd(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: a.max(p),
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

fn sum_denominator(a: f64, p: f64, v: Option<Variant>) -> f64 {
    match v {
        Some(Variant::AbsoluteDenominator) => a.abs() + p.abs(),
        _ => a + p,
    }
}

fn check_variant(metric: &str, v: Option<Variant>, allowed: &[Variant]) -> Result<()> {
    match v {
        Some(v) if !allowed.contains(&v) => Err(bad_variant(metric, v)),
        _ => Ok(()),
    }
}

pub fn fae(pair: &SeriesPair, pol: &EvaluationPolicy, v: Option<Variant>) -> Result<DirectOutcome> {
    check_variant("FAE", v, &[Variant::AbsoluteDenominator])?;
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: 2.0 * (a - p).abs(),
        den: sum_denominator(a, p, v),
    })?;
    let val = mean(&t.kept);
    Ok(t.finish(val))
}

pub fn smape(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    check_variant(
        "sMAPE",
        v,
        &[Variant::MeanDenominator, Variant::AbsoluteDenominator],
    )?;
    let t = if v == Some(Variant::MeanDenominator) {
        collect(pair, pol, |a, p| Term::Ratio {
            num: (a - p).abs(),
            den: (a + p) / 2.0,
        })?
    } else {
        collect(pair, pol, |a, p| Term::Ratio {
            num: 2.0 * (a - p).abs(),
            den: sum_denominator(a, p, v),
        })?
    };
    let val = 100.0 / t.kept.len() as f64 * sum(&t.kept);
    Ok(t.finish(val))
}

pub fn smdape(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    check_variant("SMdAPE", v, &[Variant::AbsoluteDenominator])?;
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: 2.0 * (a - p).abs(),
        den: sum_denominator(a, p, v),
    })?;
    let val = 100.0 * median(&t.kept);
    Ok(t.finish(val))
}

pub fn cm(pair: &SeriesPair, pol: &EvaluationPolicy, v: Option<Variant>) -> Result<DirectOutcome> {
    check_variant("CM", v, &[Variant::AbsoluteDenominator])?;
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).abs(),
        den: sum_denominator(a, p, v),
    })?;
    let val = sum(&t.kept);
    Ok(t.finish(val))
}

// --- squared error ------------------------------------------------------

pub fn mse(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).powi(2));
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn rmse(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).powi(2));
    let v = (sum(&t.kept) / pair.len() as f64).sqrt();
    Ok(t.finish(v))
}

pub fn sse(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).powi(2));
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn ed(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).powi(2));
    let v = sum(&t.kept).sqrt();
    Ok(t.finish(v))
}

pub fn vsd(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).powi(2),
        den: a.min(p),
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn ncsd(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).powi(2),
        den: a,
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn squd(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::Ratio {
        num: (a - p).powi(2),
        den: a + p,
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn divd(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::RatioSq {
        num: (a - p).powi(2),
        den: a + p,
    })?;
    let v = 2.0 * sum(&t.kept);
    Ok(t.finish(v))
}

fn relative_sq_terms(pair: &SeriesPair, pol: &EvaluationPolicy) -> Result<Terms> {
    let mean_a = pair.mean_actual();
    collect(pair, pol, move |a, p| Term::RatioSq {
        num: (a - p).powi(2),
        den: a - mean_a,
    })
}

pub fn rse(pair: &SeriesPair, pol: &EvaluationPolicy, v: Option<Variant>) -> Result<DirectOutcome> {
    match v.unwrap_or(Variant::Option1) {
        Variant::Option1 => {
            let t = relative_sq_terms(pair, pol)?;
            let v = sum(&t.kept);
            Ok(t.finish(v))
        }
        Variant::Option2 => {
            let (num, den) = sq_totals(pair)?;
            Ok(whole(num / den))
        }
        other => Err(bad_variant("RSE", other)),
    }
}

pub fn rrse(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    match v.unwrap_or(Variant::Option1) {
        Variant::Option1 => {
            let t = relative_sq_terms(pair, pol)?;
            let v = sum(&t.kept).sqrt();
            Ok(t.finish(v))
        }
        Variant::Option2 => {
            let (num, den) = sq_totals(pair)?;
            Ok(whole((num / den).sqrt()))
        }
        other => Err(bad_variant("RRSE", other)),
    }
}

/// 2n-th root of the product of squared errors.
pub fn grmse(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = plain(pair, |a, p| (a - p).powi(2));
    if let Some(index) = t.kept.iter().position(|x| *x <= 0.0) {
        return Err(MetricError::GeometricMeanDomain { index });
    }
    let log_sum = sum(&t.kept.iter().map(|x| x.ln()).collect::<Vec<_>>());
    let v = (log_sum / (2.0 * pair.len() as f64)).exp();
    Ok(t.finish(v))
}

fn squared_pct_terms(pair: &SeriesPair, pol: &EvaluationPolicy) -> Result<Terms> {
    collect(pair, pol, |a, p| Term::RatioSq {
        num: (a - p).powi(2),
        den: a.abs(),
    })
}

pub fn mspe(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = squared_pct_terms(pair, pol)?;
    let v = 100.0 / t.kept.len() as f64 * sum(&t.kept);
    Ok(t.finish(v))
}

pub fn mdspe(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = squared_pct_terms(pair, pol)?;
    let v = 100.0 * median(&t.kept);
    Ok(t.finish(v))
}

pub fn rmspe(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    check_variant("RMSPE", v, &[Variant::Conventional])?;
    let t = squared_pct_terms(pair, pol)?;
    let m = t.kept.len() as f64;
    let val = if v == Some(Variant::Conventional) {
        100.0 * (sum(&t.kept) / m).sqrt()
    } else {
        root(100.0 / m * sum(&t.kept))?
    };
    Ok(t.finish(val))
}

pub fn rmdspe(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    v: Option<Variant>,
) -> Result<DirectOutcome> {
    check_variant("RMdSPE", v, &[Variant::Conventional])?;
    let t = squared_pct_terms(pair, pol)?;
    let val = if v == Some(Variant::Conventional) {
        100.0 * median(&t.kept).sqrt()
    } else {
        root(100.0 * median(&t.kept))?
    };
    Ok(t.finish(val))
}

// --- log quotient -------------------------------------------------------

pub fn mdlar(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::WeightedLog {
        weight: 1.0,
        ratio: p / a,
    })?;
    let v = median(&t.kept);
    Ok(t.finish(v))
}

pub fn kld(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::WeightedLog {
        weight: p,
        ratio: p / a,
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn jd(pair: &SeriesPair, pol: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::WeightedLog {
        weight: p - a,
        ratio: p / a,
    })?;
    let v = sum(&t.kept);
    Ok(t.finish(v))
}

pub fn mnafe(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::LogThen {
        ratio: p / a,
        f: |l, _, _| l.abs().exp() - 1.0,
        a,
        p,
    })?;
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

/// The sign factor (P - A)/|P - A| is taken as 0 when P = A.
pub fn mnfb(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::LogThen {
        ratio: p / a,
        f: |l, a, p| {
            if p == a {
                0.0
            } else {
                (p - a) / (p - a).abs() * (l.abs().exp() - 1.0)
            }
        },
        a,
        p,
    })?;
    let v = mean(&t.kept);
    Ok(t.finish(v))
}

pub fn mdsa(
    pair: &SeriesPair,
    pol: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let t = collect(pair, pol, |a, p| Term::LogThen {
        ratio: p / a,
        f: |l, _, _| l.abs(),
        a,
        p,
    })?;
    let v = 100.0 * (median(&t.kept).exp() - 1.0);
    Ok(t.finish(v))
}

// --- extended -----------------------------------------------------------

fn sample_variance(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(MetricError::InsufficientData { needed: 2, got: n });
    }
    let m = mean(values);
    Ok(sum(&values.iter().map(|x| (x - m) * (x - m)).collect::<Vec<_>>()) / (n - 1) as f64)
}

fn nonzero(x: f64) -> Result<f64> {
    if x.abs() < NEAR_ZERO {
        Err(MetricError::ZeroDenominator { index: None })
    } else {
        Ok(x)
    }
}

fn rmse_value(pair: &SeriesPair) -> f64 {
    (sum(&pair
        .iter()
        .map(|(a, p)| (a - p).powi(2))
        .collect::<Vec<_>>())
        / pair.len() as f64)
        .sqrt()
}

pub fn nrmse_m(
    pair: &SeriesPair,
    _: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let v = rmse_value(pair) / nonzero(mean(pair.actuals()))?;
    Ok(whole(v))
}

pub fn nrmse_sd(
    pair: &SeriesPair,
    _: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let sd = sample_variance(pair.actuals())?.sqrt();
    let v = rmse_value(pair) / nonzero(sd)?;
    Ok(whole(v))
}

pub fn nrmse_mm(
    pair: &SeriesPair,
    _: &EvaluationPolicy,
    _: Option<Variant>,
) -> Result<DirectOutcome> {
    let max = pair
        .actuals()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = pair.actuals().iter().copied().fold(f64::INFINITY, f64::min);
    let v = rmse_value(pair) / nonzero(max - min)?;
    Ok(whole(v))
}

pub fn nmse(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    let var = sample_variance(pair.actuals())?;
    let mse = sum(&pair
        .iter()
        .map(|(a, p)| (a - p).powi(2))
        .collect::<Vec<_>>())
        / pair.len() as f64;
    let v = mse / nonzero(var)?;
    Ok(whole(v))
}

// --- composite without external inputs ---------------------------------

pub fn cod(pair: &SeriesPair, _: &EvaluationPolicy, _: Option<Variant>) -> Result<DirectOutcome> {
    if pair.len() < 2 {
        return Err(MetricError::InsufficientData {
            needed: 2,
            got: pair.len(),
        });
    }
    let mean_a = pair.mean_actual();
    let sse = sum(&pair
        .iter()
        .map(|(a, p)| (p - a).powi(2))
        .collect::<Vec<_>>());
    let tss = sum(&pair
        .actuals()
        .iter()
        .map(|a| (a - mean_a).powi(2))
        .collect::<Vec<_>>());
    let v = 1.0 - sse / nonzero(tss)?;
    Ok(whole(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> SeriesPair {
        SeriesPair::new(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 2.0, 5.0, 3.0]).unwrap()
    }

    fn val(f: DirectFormula, pair: &SeriesPair, v: Option<Variant>) -> f64 {
        f(pair, &EvaluationPolicy::fail_fast(), v).unwrap().value
    }

    #[test]
    fn rae_options() {
        assert!((val(rae, &four(), None) - 16.0 / 3.0).abs() < 1e-12);
        assert!((val(rae, &four(), Some(Variant::Option1)) - 5.33333).abs() < 1e-5);
        assert_eq!(val(rae, &four(), Some(Variant::Option2)), 1.0);
        assert!(rae(
            &four(),
            &EvaluationPolicy::fail_fast(),
            Some(Variant::Conventional)
        )
        .is_err());
    }

    #[test]
    fn sad_is_n_times_mae() {
        assert_eq!(val(sad, &four(), None), 4.0);
        assert_eq!(val(sad, &four(), None), 4.0 * val(mae, &four(), None));
    }

    #[test]
    fn median_by_selection() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn kld_hand_value() {
        let p = SeriesPair::new(vec![0.25, 0.75], vec![0.5, 0.5]).unwrap();
        assert!((val(kld, &p, None) - 0.143841).abs() < 1e-6);
    }

    #[test]
    fn mnfb_perfect_point_contributes_zero() {
        let p = SeriesPair::new(vec![2.0, 2.0], vec![1.0, 2.0]).unwrap();
        // (-1 * (2 - 1) + 0) / 2
        assert!((val(mnfb, &p, None) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn gmae_zero_error_fails() {
        let p = SeriesPair::new(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        assert!(matches!(
            gmae(&p, &EvaluationPolicy::fail_fast(), None),
            Err(MetricError::GeometricMeanDomain { index: 0 })
        ));
    }

    #[test]
    fn cod_degenerate_actuals() {
        let p = SeriesPair::new(vec![5.0, 5.0, 5.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            cod(&p, &EvaluationPolicy::fail_fast(), None).unwrap_err(),
            MetricError::ZeroDenominator { index: None }
        );
    }
}
