mod common;

use typometrics::chart::{ChartColumn, GridCoord};
use typometrics::registry::{ChartPlacement, DirectOutcome};
use typometrics::{
    blank_cells, build_chart, builtin_suite, evaluate, evaluate_suite, render_chart,
    BenchmarkInput, Category, ChartFormat, EpsilonRule, EvaluationPolicy, InSampleActuals,
    MetricError, Registry, SeriesPair,
};

#[test]
fn chart_cells_round_trip_through_the_registry() {
    let registry = Registry::global();
    let grid = build_chart(registry.definitions()).unwrap();
    for (coord, occupants) in grid.occupied() {
        for o in occupants {
            let def = registry.lookup(&o.abbreviation).unwrap();
            let cell = def.cell.expect("charted metrics have a cell");
            assert_eq!(
                GridCoord::new(
                    cell.distance,
                    ChartColumn::of(cell.normalizer),
                    cell.aggregator
                ),
                Some(*coord)
            );
            if let Some(comp) = &def.composition {
                assert_eq!(comp.cell(), cell, "{}", def.abbreviation);
            }
        }
    }
}

#[test]
fn occupancy_matches_charted_primaries() {
    let registry = Registry::global();
    let grid = build_chart(registry.definitions()).unwrap();
    let charted = registry
        .definitions()
        .iter()
        .filter(|d| d.category == Category::Primary && d.is_implemented())
        .filter(|d| {
            matches!(
                d.chart,
                ChartPlacement::Core | ChartPlacement::Alias { .. } | ChartPlacement::AsPrinted
            )
        })
        .count();
    assert_eq!(grid.occupancy_count(), charted);
    assert_eq!(blank_cells(&grid).len() + grid.occupied().count(), 100);
    let annexed: Vec<&str> = grid
        .annex()
        .iter()
        .map(|a| a.abbreviation.as_str())
        .collect();
    assert_eq!(annexed, ["JD", "MaxAE", "MNFB"]);
    let text = render_chart(&grid, ChartFormat::MarkupDocument);
    assert!(text.contains("MaxAE"));
}

fn with_zeros(pair: &SeriesPair) -> SeriesPair {
    let mut a = pair.actuals().to_vec();
    a[0] = 0.0;
    if a.len() > 3 {
        a[3] = 0.0;
    }
    SeriesPair::new(a, pair.predicted().to_vec()).unwrap()
}

/// Direct formulas apply the policy on their own; both routes must agree on
/// value, skip count and the recorded actions.
#[test]
fn oracles_agree_under_every_zero_denominator_policy() {
    let registry = Registry::global();
    let policies = [
        EvaluationPolicy::skipping(),
        EvaluationPolicy::epsilon(EpsilonRule::SmallestNonzeroActual),
        EvaluationPolicy::epsilon(EpsilonRule::FixedValue(0.25)),
    ];
    let mut compared = 0;
    for pair in common::corpus(200).iter().map(with_zeros) {
        for def in registry
            .definitions()
            .iter()
            .filter(|d| d.category == Category::Primary)
        {
            let (Some(comp), Some(direct)) = (&def.composition, def.direct) else {
                continue;
            };
            if comp.distance.uses_log() {
                continue;
            }
            for policy in &policies {
                let composed = evaluate(&pair, comp, policy);
                let oracle: Result<DirectOutcome, MetricError> = direct(&pair, policy, None);
                match (composed, oracle) {
                    (Ok(c), Ok(o)) => {
                        assert!(
                            common::close(c.value, o.value, 1e-12),
                            "{} {policy:?}: {} vs {}",
                            def.abbreviation,
                            c.value,
                            o.value
                        );
                        assert_eq!(c.points_skipped, o.skipped, "{}", def.abbreviation);
                        assert_eq!(c.policy_actions, o.actions, "{}", def.abbreviation);
                        compared += 1;
                    }
                    (Err(a), Err(b)) => assert_eq!(a.code(), b.code(), "{}", def.abbreviation),
                    (c, o) => panic!(
                        "{} {policy:?}: composed {c:?}, direct {o:?}",
                        def.abbreviation
                    ),
                }
            }
        }
    }
    assert!(compared > 1000);
}

#[test]
fn log_distances_skip_nonpositive_ratios_in_both_routes() {
    let registry = Registry::global();
    let pair = SeriesPair::new(vec![1.0, -2.0, 3.0, 4.0], vec![2.0, 2.0, 6.0, 3.0]).unwrap();
    let policy = EvaluationPolicy::skipping();
    for name in ["MdLAR", "MdSA", "MNAFE", "KLD"] {
        let def = registry.lookup(name).unwrap();
        let oracle = (def.direct.unwrap())(&pair, &policy, None).unwrap();
        assert_eq!(oracle.skipped, 1, "{name}");
        if let Some(comp) = &def.composition {
            let composed = evaluate(&pair, comp, &policy).unwrap();
            assert!(common::close(composed.value, oracle.value, 1e-12), "{name}");
            assert_eq!(composed.points_skipped, 1);
        }
        assert!(matches!(
            registry.evaluate_named(&pair, name, &EvaluationPolicy::fail_fast(), None),
            Err(MetricError::NonpositiveLogRatio { index: 1 })
        ));
    }
}

#[test]
fn suites_are_deterministic_and_complete() {
    let pair = common::corpus(1).remove(0);
    let suite = builtin_suite("percentage").unwrap();
    let first = evaluate_suite(&pair, &suite, &[], &EvaluationPolicy::fail_fast()).unwrap();
    let second = evaluate_suite(&pair, &suite, &[], &EvaluationPolicy::fail_fast()).unwrap();
    assert_eq!(first, second);
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["MAPE", "MdAPE", "sMAPE"]);

    let scaled =
        typometrics::SuiteDefinition::new("scaled", &["MAE", "MASE", "RelRMSE"], "").unwrap();
    assert!(matches!(
        evaluate_suite(&pair, &scaled, &[], &EvaluationPolicy::fail_fast()),
        Err(MetricError::MissingBenchmark { .. })
    ));
    let aux = [
        BenchmarkInput::InSampleActuals(InSampleActuals::new(vec![1.0, 2.0, 4.0]).unwrap()),
        BenchmarkInput::BenchmarkPair(pair.clone()),
    ];
    let results = evaluate_suite(&pair, &scaled, &aux, &EvaluationPolicy::fail_fast()).unwrap();
    assert_eq!(results.len(), 3);
    assert_eq!(results[2].1.as_ref().unwrap().value, 1.0);
}

#[test]
fn catalog_export_is_machine_readable() {
    let records = Registry::global().catalog_records();
    let json = serde_json::to_value(&records).unwrap();
    let array = json.as_array().unwrap();
    assert_eq!(array.len(), Registry::global().definitions().len());
    let mdape = array.iter().find(|r| r["abbreviation"] == "MdAPE").unwrap();
    assert_eq!(mdape["cell"], "(D2, N2, G2)");
    assert_eq!(mdape["dimension"], "percent");
    assert_eq!(mdape["category"], "primary");
}
