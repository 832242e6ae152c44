use proptest::prelude::*;
use typometrics::derived::{
    coefficient_of_determination, relative_metric, RelativeBase, RelativeForm,
};
use typometrics::evaluator::{aggregate, PointVector};
use typometrics::{
    evaluate, evaluate_named, AggregatorKind, Category, DistanceKind, EpsilonRule,
    EvaluationPolicy, MetricError, NormalizerKind, NormalizerSpec, Registry, SeriesPair,
};

fn positive_pair() -> impl Strategy<Value = SeriesPair> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0.5f64..10.0, n),
            prop::collection::vec(0.5f64..10.0, n),
        )
            .prop_map(|(a, p)| SeriesPair::new(a, p).unwrap())
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn value(pair: &SeriesPair, name: &str) -> f64 {
    evaluate_named(pair, name, &EvaluationPolicy::fail_fast(), None)
        .unwrap()
        .value
}

proptest! {
    #[test]
    fn mismatched_lengths_never_make_a_pair(
        a in prop::collection::vec(-1e6f64..1e6, 1..20),
        p in prop::collection::vec(-1e6f64..1e6, 1..20),
    ) {
        prop_assume!(a.len() != p.len());
        let is_mismatch = matches!(SeriesPair::new(a, p), Err(MetricError::LengthMismatch { .. }));
        prop_assert!(is_mismatch);
    }

    #[test]
    fn non_finite_values_never_make_a_pair(
        a in prop::collection::vec(-1e6f64..1e6, 1..20),
        at in any::<prop::sample::Index>(),
        bad in prop::sample::select(vec![f64::NAN, f64::INFINITY, f64::NEG_INFINITY]),
        in_actuals in any::<bool>(),
    ) {
        let i = at.index(a.len());
        let mut p = a.clone();
        let mut a = a;
        if in_actuals { a[i] = bad } else { p[i] = bad }
        let is_non_finite = matches!(SeriesPair::new(a, p), Err(MetricError::NonFiniteValue { index }) if index == i);
        prop_assert!(is_non_finite);
    }

    #[test]
    fn normalizer_spec_round_trips_through_toml(
        kind in prop::sample::select(NormalizerKind::ALL.to_vec()),
        c in prop::sample::select(vec![-1, 1, 2]),
        absolute in any::<bool>(),
        factor in 1e-3f64..1e3,
    ) {
        let mut spec = NormalizerSpec::new(kind, c).unwrap().with_factor(factor);
        if absolute {
            spec = spec.absolute();
        }
        let text = toml::to_string(&spec).unwrap();
        let back: NormalizerSpec = toml::from_str(&text).unwrap();
        prop_assert_eq!(back, spec);
        prop_assert_eq!(back.numerator_factor.to_bits(), spec.numerator_factor.to_bits());
    }

    #[test]
    fn scale_equivariance(pair in positive_pair(), k in 0.01f64..100.0) {
        let scaled = pair.affine(k, 0.0).unwrap();
        for m in ["MAE", "RMSE", "ME", "MdAE", "SAD"] {
            prop_assert!(close(value(&scaled, m), k * value(&pair, m)), "{}", m);
        }
    }

    #[test]
    fn scale_invariance(pair in positive_pair(), k in 0.01f64..100.0) {
        let scaled = pair.affine(k, 0.0).unwrap();
        for m in ["MAPE", "sMAPE", "MARE", "MdSA", "MdLAR"] {
            prop_assert!(close(value(&scaled, m), value(&pair, m)), "{}", m);
        }
    }

    #[test]
    fn swap_laws(pair in positive_pair()) {
        let swapped = pair.swapped();
        for m in ["ME", "MdLAR"] {
            prop_assert!(close(value(&swapped, m), -value(&pair, m)), "{}", m);
        }
        for m in ["sMAPE", "FAE", "MdSA", "MNAFE"] {
            prop_assert!(close(value(&swapped, m), value(&pair, m)), "{}", m);
        }
    }

    #[test]
    fn aggregator_laws(values in prop::collection::vec(0.0f64..1e3, 1..50)) {
        let v = PointVector::from_values(values.clone());
        let mean = aggregate(&v, AggregatorKind::Mean).unwrap();
        let sum = aggregate(&v, AggregatorKind::Sum).unwrap();
        prop_assert!(close(sum, values.len() as f64 * mean));
        if values.iter().all(|x| *x > 0.0) {
            let gm = aggregate(&v, AggregatorKind::GeometricMean).unwrap();
            prop_assert!(gm <= mean * (1.0 + 1e-12));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut spiked = values.clone();
        spiked[0] = 1e6 * hi.max(1.0);
        let median = aggregate(&PointVector::from_values(spiked), AggregatorKind::Median).unwrap();
        if values.len() >= 3 {
            prop_assert!(median >= lo && median <= hi);
        }
    }

    #[test]
    fn perfect_prediction_is_zero(actuals in prop::collection::vec(0.5f64..10.0, 2..30)) {
        let pair = SeriesPair::new(actuals.clone(), actuals).unwrap();
        for def in Registry::global().definitions() {
            let Some(comp) = &def.composition else { continue };
            if def.category != Category::Primary || comp.aggregator == AggregatorKind::GeometricMean {
                continue;
            }
            match evaluate(&pair, comp, &EvaluationPolicy::fail_fast()) {
                Ok(r) => prop_assert_eq!(r.value, 0.0, "{}", def.abbreviation),
                // only the variability normalizer can meet a zero base here
                Err(e) => prop_assert!(
                    matches!(e, MetricError::ZeroDenominator { .. }) && comp.normalizer.kind == NormalizerKind::ByVariabilityOfActuals,
                    "{}: {}", def.abbreviation, e
                ),
            }
        }
    }

    #[test]
    fn geometric_means_reject_perfect_points(actuals in prop::collection::vec(0.5f64..10.0, 2..30)) {
        let pair = SeriesPair::new(actuals.clone(), actuals).unwrap();
        let is_domain_error = matches!(
            evaluate_named(&pair, "GMAE", &EvaluationPolicy::skipping(), None),
            Err(MetricError::GeometricMeanDomain { index: 0 })
        );
        prop_assert!(is_domain_error);
    }

    #[test]
    fn diagnostics_are_conserved(
        pair in positive_pair(),
        zeros in prop::collection::vec(any::<bool>(), 40),
        policy in prop::sample::select(vec![
            EvaluationPolicy::skipping(),
            EvaluationPolicy::epsilon(EpsilonRule::SmallestNonzeroActual),
            EvaluationPolicy::epsilon(EpsilonRule::FixedValue(0.01)),
        ]),
    ) {
        let mut a = pair.actuals().to_vec();
        let n = a.len();
        for (x, z) in a.iter_mut().zip(&zeros) {
            if *z { *x = 0.0 }
        }
        prop_assume!(a.iter().any(|x| *x != 0.0));
        let zero_count = a.iter().filter(|x| **x == 0.0).count();
        let pair = SeriesPair::new(a, pair.predicted().to_vec()).unwrap();
        let r = evaluate_named(&pair, "MAPE", &policy, None).unwrap();
        prop_assert_eq!(r.points_total, n);
        prop_assert_eq!(r.points_used() + r.points_skipped, r.points_total);
        prop_assert_eq!(r.policy_actions.len(), zero_count);
        if policy == EvaluationPolicy::skipping() {
            prop_assert_eq!(r.points_skipped, zero_count);
        } else {
            prop_assert_eq!(r.points_skipped, 0);
        }
        prop_assert_eq!(r.degenerate, zero_count > 0);
    }

    #[test]
    fn jeffreys_divergence_is_nonnegative(pair in positive_pair()) {
        prop_assert!(value(&pair, "JD") >= 0.0);
    }

    #[test]
    fn pointwise_distance_identities(pair in positive_pair()) {
        let policy = EvaluationPolicy::fail_fast();
        let d = |k| typometrics::evaluator::point_distances(&pair, k, &policy).unwrap().values().to_vec();
        let (d2, d3) = (d(DistanceKind::AbsoluteError), d(DistanceKind::SquaredError));
        let (d4, d5) = (d(DistanceKind::LogQuotient), d(DistanceKind::AbsLogQuotient));
        for j in 0..pair.len() {
            prop_assert_eq!(d3[j], d2[j] * d2[j]);
            prop_assert_eq!(d5[j], d4[j].abs());
        }
    }

    #[test]
    fn relative_to_itself_is_one(pair in positive_pair()) {
        let policy = EvaluationPolicy::fail_fast();
        for base in [RelativeBase::Mae, RelativeBase::Rmse, RelativeBase::Gmae, RelativeBase::Grmse] {
            let ratio = relative_metric(&pair, &pair, base, RelativeForm::Ratio, &policy).unwrap();
            prop_assert_eq!(ratio.result.value, 1.0);
            prop_assert_eq!(ratio.interpretation.as_str(), "equal to the benchmark");
            let log = relative_metric(&pair, &pair, base, RelativeForm::LogRatio, &policy).unwrap();
            prop_assert_eq!(log.result.value, 0.0);
        }
    }

    #[test]
    fn determination_is_affine_invariant(pair in positive_pair(), k in 0.1f64..10.0, b in -5.0f64..5.0) {
        let spread = pair.actuals().iter().fold(0.0f64, |m, a| m.max((a - pair.mean_actual()).abs()));
        prop_assume!(spread > 1e-3);
        let base = coefficient_of_determination(&pair).unwrap().value;
        let moved = coefficient_of_determination(&pair.affine(k, b).unwrap()).unwrap().value;
        prop_assert!(close(moved, base));
        let perfect = SeriesPair::new(pair.actuals().to_vec(), pair.actuals().to_vec()).unwrap();
        prop_assert_eq!(coefficient_of_determination(&perfect).unwrap().value, 1.0);
    }
}
