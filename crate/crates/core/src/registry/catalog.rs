use super::direct as d;
use super::{
    Category, ChartPlacement, DirectFormula, MetricDefinition, Requirement, Status, Variant,
};
use crate::types::{
    AggregatorKind as G, Cell, Dimension, DistanceKind as D, MetricComposition,
    NormalizerKind as N, NormalizerSpec, PointTransform, PostTransform,
};

const OPTIONS: &[Variant] = &[Variant::Option1, Variant::Option2];
const ABS: &[Variant] = &[Variant::AbsoluteDenominator];
const CONVENTIONAL: &[Variant] = &[Variant::Conventional];

fn norm(kind: N, c: i32) -> NormalizerSpec {
    NormalizerSpec {
        kind,
        exponent_c: c,
        absolute_denominator: false,
        numerator_factor: 1.0,
    }
}

fn unit() -> NormalizerSpec {
    NormalizerSpec::unitary()
}

fn comp(distance: D, normalizer: NormalizerSpec, aggregator: G) -> MetricComposition {
    MetricComposition::new(distance, normalizer, aggregator)
}

fn percent(c: MetricComposition) -> MetricComposition {
    c.then(PostTransform::Scale(100.0))
}

fn base(
    abbreviation: &'static str,
    full_name: &'static str,
    category: Category,
) -> MetricDefinition {
    MetricDefinition {
        abbreviation,
        full_name,
        aliases: &[],
        category,
        composition: None,
        direct: None,
        variants: &[],
        cell: None,
        exponent_c: None,
        chart: ChartPlacement::Hidden,
        dimension: Dimension::Dimensionless,
        requires: Requirement::None,
        status: Status::Implemented,
        notes: "",
    }
}

/// A primary metric charted as the main occupant of its cell.
fn primary(
    abbreviation: &'static str,
    full_name: &'static str,
    composition: MetricComposition,
    direct: DirectFormula,
) -> MetricDefinition {
    let chart = if composition.aggregator.is_core() {
        ChartPlacement::Core
    } else {
        ChartPlacement::Annex {
            note: "aggregator outside the four core rows",
        }
    };
    let exponent_c =
        (composition.normalizer.kind != N::Unitary).then_some(composition.normalizer.exponent_c);
    MetricDefinition {
        cell: Some(composition.cell()),
        dimension: composition.dimension(),
        exponent_c,
        chart,
        direct: Some(direct),
        composition: Some(composition),
        ..base(abbreviation, full_name, Category::Primary)
    }
}

impl MetricDefinition {
    fn aka(mut self, aliases: &'static [&'static str]) -> Self {
        self.aliases = aliases;
        self
    }

    fn with_variants(mut self, variants: &'static [Variant]) -> Self {
        self.variants = variants;
        self
    }

    /// Shown on a second line under `of`, without its own exponent label.
    fn alias_of(mut self, of: &'static str) -> Self {
        self.chart = ChartPlacement::Alias { of };
        self.exponent_c = None;
        self
    }

    fn annex(mut self, note: &'static str) -> Self {
        self.chart = ChartPlacement::Annex { note };
        self
    }

    fn note(mut self, notes: &'static str) -> Self {
        self.notes = notes;
        self
    }
}

fn extended(
    abbreviation: &'static str,
    full_name: &'static str,
    direct: DirectFormula,
) -> MetricDefinition {
    MetricDefinition {
        direct: Some(direct),
        ..base(abbreviation, full_name, Category::Extended)
    }
}

fn needs(
    abbreviation: &'static str,
    full_name: &'static str,
    requires: Requirement,
    dimension: Dimension,
) -> MetricDefinition {
    MetricDefinition {
        requires,
        dimension,
        ..base(abbreviation, full_name, Category::Composite)
    }
}

fn stub(
    abbreviation: &'static str,
    full_name: &'static str,
    category: Category,
    reason: &'static str,
) -> MetricDefinition {
    MetricDefinition {
        status: Status::OutOfScope { reason },
        ..base(abbreviation, full_name, category)
    }
}

pub(super) fn definitions() -> Vec<MetricDefinition> {
    let by_actuals_abs = |c| norm(N::ByActuals, c).absolute();
    let by_variability_abs = |c| norm(N::ByVariabilityOfActuals, c).absolute();
    let by_sum2 = norm(N::BySumActualPredicted, 1).with_factor(2.0);

    vec![
        // signed error
        primary("ME", "Mean Error", comp(D::Error, unit(), G::Mean), d::me).aka(&["MBE", "bias"]),
        primary(
            "MNB",
            "Mean Normalized Bias",
            comp(D::Error, norm(N::ByActuals, 1), G::Mean),
            d::mnb,
        ),
        primary(
            "MPE",
            "Mean Percentage Error",
            percent(comp(D::Error, norm(N::ByActuals, 1), G::Mean)),
            d::mpe,
        )
        .alias_of("MNB"),
        primary(
            "FB",
            "Fractional Bias",
            comp(D::Error, by_sum2, G::Mean),
            d::fb,
        ),
        primary(
            "MD",
            "Manhattan Distance",
            comp(D::Error, unit(), G::Sum),
            d::md,
        )
        .note("signed sum of errors; the absolute sum is SAD"),
        // absolute error
        primary(
            "MAE",
            "Mean Absolute Error",
            comp(D::AbsoluteError, unit(), G::Mean),
            d::mae,
        )
        .aka(&["MAD", "MAGE", "MCD"]),
        primary(
            "MdAE",
            "Median Absolute Error",
            comp(D::AbsoluteError, unit(), G::Median),
            d::mdae,
        ),
        primary(
            "GMAE",
            "Geometric Mean Absolute Error",
            comp(D::AbsoluteError, unit(), G::GeometricMean),
            d::gmae,
        ),
        primary(
            "SAD",
            "Sum of Absolute Differences",
            comp(D::AbsoluteError, unit(), G::Sum),
            d::sad,
        ),
        primary(
            "MaxAE",
            "Maximum Absolute Error",
            comp(D::AbsoluteError, unit(), G::Maximum),
            d::maxae,
        ),
        primary(
            "MARE",
            "Mean Absolute Relative Error",
            comp(D::AbsoluteError, by_actuals_abs(1), G::Mean),
            d::mare,
        )
        .aka(&["MMRE"]),
        primary(
            "MAPE",
            "Mean Absolute Percentage Error",
            percent(comp(D::AbsoluteError, by_actuals_abs(1), G::Mean)),
            d::mape,
        )
        .alias_of("MARE"),
        primary(
            "MdAPE",
            "Median Absolute Percentage Error",
            percent(comp(D::AbsoluteError, by_actuals_abs(1), G::Median)),
            d::mdape,
        ),
        primary(
            "MRAE",
            "Mean Relative Absolute Error",
            comp(D::AbsoluteError, by_variability_abs(1), G::Mean),
            d::mrae,
        )
        .with_variants(OPTIONS),
        primary(
            "MdRAE",
            "Median Relative Absolute Error",
            comp(D::AbsoluteError, by_variability_abs(1), G::Median),
            d::mdrae,
        ),
        primary(
            "GMRAE",
            "Geometric Mean Relative Absolute Error",
            comp(D::AbsoluteError, by_variability_abs(1), G::GeometricMean),
            d::gmrae,
        ),
        primary(
            "RAE",
            "Relative Absolute Error",
            comp(D::AbsoluteError, by_variability_abs(1), G::Sum),
            d::rae,
        )
        .with_variants(OPTIONS),
        primary(
            "FAE",
            "Fractional Absolute Error",
            comp(D::AbsoluteError, by_sum2, G::Mean),
            d::fae,
        )
        .with_variants(ABS),
        primary(
            "sMAPE",
            "Symmetric Mean Absolute Percentage Error",
            percent(comp(D::AbsoluteError, by_sum2, G::Mean)),
            d::smape,
        )
        .alias_of("FAE")
        .with_variants(&[Variant::MeanDenominator, Variant::AbsoluteDenominator]),
        primary(
            "SMdAPE",
            "Symmetric Median Absolute Percentage Error",
            percent(comp(D::AbsoluteError, by_sum2, G::Median)),
            d::smdape,
        )
        .with_variants(ABS),
        primary(
            "CM",
            "Canberra Metric",
            comp(D::AbsoluteError, norm(N::BySumActualPredicted, 1), G::Sum),
            d::cm,
        )
        .with_variants(ABS),
        primary(
            "WHD",
            "Wave Hedges Distance",
            comp(D::AbsoluteError, norm(N::ByMaxActualPredicted, 1), G::Sum),
            d::whd,
        ),
        // squared error
        primary(
            "MSE",
            "Mean Squared Error",
            comp(D::SquaredError, unit(), G::Mean),
            d::mse,
        ),
        primary(
            "RMSE",
            "Root Mean Squared Error",
            comp(D::SquaredError, unit(), G::Mean).then(PostTransform::Sqrt),
            d::rmse,
        )
        .alias_of("MSE"),
        primary(
            "GRMSE",
            "Geometric Root Mean Squared Error",
            comp(D::SquaredError, unit(), G::GeometricMean).then(PostTransform::Sqrt),
            d::grmse,
        ),
        primary(
            "SSE",
            "Sum of Squared Error",
            comp(D::SquaredError, unit(), G::Sum),
            d::sse,
        ),
        primary(
            "ED",
            "Euclidean Distance",
            comp(D::SquaredError, unit(), G::Sum).then(PostTransform::Sqrt),
            d::ed,
        )
        .alias_of("SSE"),
        primary(
            "MSPE",
            "Mean Square Percentage Error",
            percent(comp(D::SquaredError, by_actuals_abs(2), G::Mean)),
            d::mspe,
        ),
        primary(
            "RMSPE",
            "Root Mean Square Percentage Error",
            percent(comp(D::SquaredError, by_actuals_abs(2), G::Mean)).then(PostTransform::Sqrt),
            d::rmspe,
        )
        .alias_of("MSPE")
        .with_variants(CONVENTIONAL)
        .note("sqrt(100 * mean ratio^2); the conventional variant is 100 * sqrt(mean ratio^2)"),
        primary(
            "MdSPE",
            "Median Square Percentage Error",
            percent(comp(D::SquaredError, by_actuals_abs(2), G::Median)),
            d::mdspe,
        ),
        primary(
            "RMdSPE",
            "Root Median Square Percentage Error",
            percent(comp(D::SquaredError, by_actuals_abs(2), G::Median)).then(PostTransform::Sqrt),
            d::rmdspe,
        )
        .alias_of("MdSPE")
        .with_variants(CONVENTIONAL)
        .note("sqrt(100 * median ratio^2); the conventional variant is 100 * sqrt(median ratio^2)"),
        primary(
            "NCSD",
            "Neyman Chi-Square Distance",
            comp(D::SquaredError, norm(N::ByActuals, 1), G::Sum),
            d::ncsd,
        ),
        primary(
            "RSE",
            "Relative Squared Error",
            comp(D::SquaredError, norm(N::ByVariabilityOfActuals, 2), G::Sum),
            d::rse,
        )
        .with_variants(OPTIONS),
        primary(
            "RRSE",
            "Root Relative Squared Error",
            comp(D::SquaredError, norm(N::ByVariabilityOfActuals, 2), G::Sum)
                .then(PostTransform::Sqrt),
            d::rrse,
        )
        .alias_of("RSE")
        .with_variants(OPTIONS),
        primary(
            "SquD",
            "Squared Chi-square Distance",
            comp(D::SquaredError, norm(N::BySumActualPredicted, 1), G::Sum),
            d::squd,
        ),
        primary(
            "DivD",
            "Divergence Distance",
            comp(
                D::SquaredError,
                norm(N::BySumActualPredicted, 2).with_factor(2.0),
                G::Sum,
            ),
            d::divd,
        ),
        primary(
            "VSD",
            "Vicis Symmetric Distance",
            comp(D::SquaredError, norm(N::ByMinActualPredicted, 1), G::Sum),
            d::vsd,
        ),
        // log quotient
        primary(
            "MdLAR",
            "Median Log Accuracy Ratio",
            comp(D::LogQuotient, unit(), G::Median),
            d::mdlar,
        ),
        MetricDefinition {
            direct: Some(d::kld),
            cell: Some(Cell::new(D::LogQuotient, N::ByActuals, G::Sum)),
            exponent_c: Some(-1),
            chart: ChartPlacement::AsPrinted,
            dimension: Dimension::SameAsData,
            notes:
                "sum of P_j ln(P_j/A_j); charted where printed although the weight is P_j, not A_j",
            ..base("KLD", "Kullback-Leibler Divergence", Category::Primary)
        },
        MetricDefinition {
            direct: Some(d::jd),
            chart: ChartPlacement::Annex {
                note: "direct formula only; not placed in the printed chart",
            },
            dimension: Dimension::SameAsData,
            notes: "sum of (P_j - A_j) ln(P_j/A_j), nonnegative for positive data",
            ..base("JD", "Jeffreys Divergence", Category::Primary)
        },
        // absolute log quotient
        primary(
            "MNAFE",
            "Mean Normalized Absolute Factor Error",
            comp(D::AbsLogQuotient, unit(), G::Mean)
                .with_point_transform(PointTransform::ExpMinusOne),
            d::mnafe,
        ),
        primary(
            "MNFB",
            "Mean Normalized Factor Bias",
            comp(D::AbsLogQuotient, unit(), G::Mean)
                .with_point_transform(PointTransform::SignedExpMinusOne),
            d::mnfb,
        )
        .annex("signed factor normalizer; not placed in the printed chart"),
        primary(
            "MdSA",
            "Median Symmetric Accuracy",
            comp(D::AbsLogQuotient, unit(), G::Median).then(PostTransform::SymmetricAccuracy),
            d::mdsa,
        ),
        // extended
        extended(
            "NRMSE_m",
            "Normalized RMSE (by the mean of actuals)",
            d::nrmse_m,
        )
        .aka(&["CVRMSE"]),
        extended(
            "NRMSE_sd",
            "Normalized RMSE (by the standard deviation of actuals)",
            d::nrmse_sd,
        ),
        extended(
            "NRMSE_mm",
            "Normalized RMSE (by the range of actuals)",
            d::nrmse_mm,
        ),
        extended(
            "NMSE",
            "Normalized Mean Squared Error (by the variance of actuals)",
            d::nmse,
        ),
        // composite
        MetricDefinition {
            direct: Some(d::cod),
            ..base("CoD", "Coefficient of Determination", Category::Composite)
        },
        needs(
            "MASE",
            "Mean Absolute Scaled Error",
            Requirement::InSampleActuals,
            Dimension::Dimensionless,
        )
        .note("MAE divided by the in-sample mean absolute first difference"),
        needs(
            "RMAE",
            "Relative Mean Absolute Error",
            Requirement::BenchmarkPair,
            Dimension::Dimensionless,
        )
        .aka(&["RelMAE"]),
        needs(
            "RelRMSE",
            "Relative Root Mean Square Error",
            Requirement::BenchmarkPair,
            Dimension::Dimensionless,
        )
        .aka(&["Theil's U"]),
        needs(
            "LMR",
            "Log Mean Squared Error Ratio",
            Requirement::BenchmarkPair,
            Dimension::Dimensionless,
        ),
        needs(
            "RGRMSE",
            "Relative Geometric RMSE",
            Requirement::BenchmarkPair,
            Dimension::Dimensionless,
        ),
        // catalogued only
        stub(
            "MAAPE",
            "Mean Arctangent Absolute Percentage Error",
            Category::Primary,
            "the arctangent transform does not fit the distance/normalizer/aggregator composition",
        ),
        stub(
            "IPD",
            "Inner Product Distance",
            Category::Primary,
            "multiplicative distance for vector or binary data, outside numerical regression",
        ),
        stub(
            "HMD",
            "Harmonic Mean Distance",
            Category::Primary,
            "multiplicative distance for vector or binary data, outside numerical regression",
        ),
        stub(
            "MdASE",
            "Median Absolute Scaled Error",
            Category::Composite,
            "named in the literature but no formula is given",
        ),
        stub(
            "RMSSE",
            "Root Mean Squared Scaled Error",
            Category::Composite,
            "named in the literature but no formula is given",
        ),
        stub(
            "CumRAE",
            "Cumulative Relative Absolute Error",
            Category::Composite,
            "named in the literature but no formula is given",
        ),
    ]
}
