use super::PointVector;
use crate::error::{MetricError, Result};
use crate::types::AggregatorKind;

// 2^500, used to keep the running product of a geometric mean in range.

/// Reduces the usable points to a single value. Skipped points are left out
/// of every denominator.
pub fn aggregate(points: &PointVector, kind: AggregatorKind) -> Result<f64> {
    kind.validate()?;
    let values: Vec<f64> = points.usable().map(|(_, v)| v).collect();
    if values.is_empty() {
        return Err(MetricError::EmptyAggregation);
    }
    let m = values.len() as f64;
    match kind {
        AggregatorKind::Mean => Ok(values.iter().sum::<f64>() / m),
        AggregatorKind::Sum => Ok(values.iter().sum()),
        AggregatorKind::Median => Ok(median(values)),
        AggregatorKind::Maximum => Ok(values.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        AggregatorKind::GeometricMean => {
            if let Some((index, _)) = points.usable().find(|(_, v)| *v <= 0.0) {
                return Err(MetricError::GeometricMeanDomain { index });
            }
            Ok(geometric_mean(&values))
        }
        AggregatorKind::HarmonicMean => {
            if let Some((index, _)) = points.usable().find(|(_, v)| *v == 0.0) {
                return Err(MetricError::HarmonicMeanDomain { index });
            }
            Ok(m / values.iter().map(|v| 1.0 / v).sum::<f64>())
        }
        AggregatorKind::TruncatedMean(f) => {
            let sorted = sorted(values);
            let k = (f * m).floor() as usize;
            let kept = &sorted[k..sorted.len() - k];
            Ok(kept.iter().sum::<f64>() / kept.len() as f64)
        }
        AggregatorKind::WinsorizedMean(f) => {
            let mut sorted = sorted(values);
            let k = (f * m).floor() as usize;
            let n = sorted.len();
            if k > 0 {
                let (lo, hi) = (sorted[k], sorted[n - 1 - k]);
                sorted[..k].fill(lo);
                sorted[n - k..].fill(hi);
            }
            Ok(sorted.iter().sum::<f64>() / m)
        }
    }
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

fn median(values: Vec<f64>) -> f64 {
    let v = sorted(values);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// n-th root of the product, with power-of-two rescaling so long series
/// neither overflow nor underflow.
fn geometric_mean(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let product: f64 = values.iter().product();
    if product.is_finite() && product >= f64::MIN_POSITIVE {
        return product.powf(1.0 / m);
    }
    // Over- or underflow: carry the binary exponent separately.
    let mut mantissa = 1.0;
    let mut exponent: i64 = 0;
    for &v in values {
        let (fv, ev) = split(v);
        let (fp, ep) = split(mantissa * fv);
        mantissa = fp;
        exponent += ev + ep;
    }
    mantissa.powf(1.0 / m) * (exponent as f64 / m).exp2()
}

/// `v = f * 2^e` with `f` in [0.5, 1), for positive finite `v`.
fn split(v: f64) -> (f64, i64) {
    let (v, bias) = if v < f64::MIN_POSITIVE {
        (v * 2f64.powi(64), -64)
    } else {
        (v, 0)
    };
    let bits = v.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let f = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (f, e + bias)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(values: &[f64], kind: AggregatorKind) -> Result<f64> {
        aggregate(&PointVector::from_values(values.to_vec()), kind)
    }

    #[test]
    fn median_of_even_count_averages_middle_pair() {
        assert_eq!(
            agg(&[0.0, 1.0, 1.0, 2.0], AggregatorKind::Median).unwrap(),
            1.0
        );
        assert_eq!(
            agg(&[4.0, 1.0, 3.0, 2.0], AggregatorKind::Median).unwrap(),
            2.5
        );
        assert_eq!(agg(&[9.0], AggregatorKind::Median).unwrap(), 9.0);
    }

    #[test]
    fn geometric_mean_of_two() {
        let g = agg(&[2.0, 4.0], AggregatorKind::GeometricMean).unwrap();
        assert!((g - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            agg(&[10.0, 10.0], AggregatorKind::GeometricMean).unwrap(),
            10.0
        );
    }

    #[test]
    fn geometric_mean_rejects_zero() {
        assert_eq!(
            agg(&[1.0, 0.0, 2.0, 1.0], AggregatorKind::GeometricMean).unwrap_err(),
            MetricError::GeometricMeanDomain { index: 1 }
        );
        assert!(agg(&[1.0, -2.0], AggregatorKind::GeometricMean).is_err());
    }

    #[test]
    fn geometric_mean_survives_extreme_products() {
        let big = vec![1e200; 10];
        let g = agg(&big, AggregatorKind::GeometricMean).unwrap();
        assert!((g / 1e200 - 1.0).abs() < 1e-12);
        let tiny = vec![1e-200; 10];
        let g = agg(&tiny, AggregatorKind::GeometricMean).unwrap();
        assert!((g / 1e-200 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean() {
        assert!((agg(&[1.0, 4.0, 4.0], AggregatorKind::HarmonicMean).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            agg(&[1.0, 0.0], AggregatorKind::HarmonicMean),
            Err(MetricError::HarmonicMeanDomain { index: 1 })
        ));
    }

    #[test]
    fn trimmed_and_winsorized() {
        let v = [1.0, 2.0, 3.0, 4.0, 100.0];
        // floor(0.2 * 5) = 1 from each end
        assert_eq!(agg(&v, AggregatorKind::TruncatedMean(0.2)).unwrap(), 3.0);
        assert_eq!(
            agg(&v, AggregatorKind::WinsorizedMean(0.2)).unwrap(),
            (2.0 + 2.0 + 3.0 + 4.0 + 4.0) / 5.0
        );
        assert_eq!(agg(&v, AggregatorKind::TruncatedMean(0.0)).unwrap(), 22.0);
    }

    #[test]
    fn maximum_and_sum() {
        assert_eq!(
            agg(&[1.0, 7.0, -3.0], AggregatorKind::Maximum).unwrap(),
            7.0
        );
        assert_eq!(agg(&[1.0, 7.0, -3.0], AggregatorKind::Sum).unwrap(), 5.0);
    }

    #[test]
    fn constant_vector_is_fixed_point_of_mean_family() {
        let c = 3.75;
        let v = vec![c; 7];
        for kind in [
            AggregatorKind::Mean,
            AggregatorKind::Median,
            AggregatorKind::GeometricMean,
            AggregatorKind::Maximum,
            AggregatorKind::HarmonicMean,
            AggregatorKind::TruncatedMean(0.3),
            AggregatorKind::WinsorizedMean(0.3),
        ] {
            assert!((agg(&v, kind).unwrap() - c).abs() < 1e-14, "{kind:?}");
        }
    }

    #[test]
    fn empty_aggregation() {
        assert_eq!(
            agg(&[], AggregatorKind::Mean).unwrap_err(),
            MetricError::EmptyAggregation
        );
    }
}
