//! Catalog of named metrics: abbreviations, aliases, compositions, direct
//! formulas and chart placement, plus lookup and evaluation by name.

mod catalog;
pub mod direct;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

pub use direct::{DirectFormula, DirectOutcome};

use crate::error::{MetricError, Result};
use crate::evaluator;
use crate::types::{
    Cell, Dimension, EvaluationPolicy, MetricComposition, MetricResult, PostTransform, SeriesPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Primary,
    Extended,
    Composite,
}

impl FromStr for Category {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "primary" => Ok(Category::Primary),
            "extended" => Ok(Category::Extended),
            "composite" => Ok(Category::Composite),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown category '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Primary => "primary",
            Category::Extended => "extended",
            Category::Composite => "composite",
        })
    }
}

/// Alternative definitions a metric can be evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Per-point ratio, then aggregate (RAE, MRAE, RSE, RRSE default).
    Option1,
    /// Ratio of aggregates.
    Option2,
    /// sMAPE with (A + P) / 2 in the denominator.
    MeanDenominator,
    /// |A| + |P| in the denominator.
    AbsoluteDenominator,
    /// 100 * sqrt(.) instead of sqrt(100 * .) for RMSPE / RMdSPE.
    Conventional,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Option1 => "option1",
            Variant::Option2 => "option2",
            Variant::MeanDenominator => "mean-denominator",
            Variant::AbsoluteDenominator => "absolute",
            Variant::Conventional => "conventional",
        })
    }
}

impl FromStr for Variant {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "option1" | "opt1" | "1" => Ok(Variant::Option1),
            "option2" | "opt2" | "2" => Ok(Variant::Option2),
            "mean-denominator" | "mean" => Ok(Variant::MeanDenominator),
            "absolute" | "abs" => Ok(Variant::AbsoluteDenominator),
            "conventional" => Ok(Variant::Conventional),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown variant '{other}'"
            ))),
        }
    }
}

/// Where a definition shows up in the typology chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartPlacement {
    /// Main occupant of its composition's cell.
    Core,
    /// Printed on a second line under another occupant it post-transforms.
    Alias {
        of: &'static str,
    },
    /// No composition, but the printed chart puts it at `cell`.
    AsPrinted,
    /// Charted outside the core grid with a note.
    Annex {
        note: &'static str,
    },
    Hidden,
}

/// Extra input a metric needs beyond the evaluation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    None,
    BenchmarkPair,
    InSampleActuals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Implemented,
    OutOfScope { reason: &'static str },
}

#[derive(Debug, Clone)]
pub struct MetricDefinition {
    pub abbreviation: &'static str,
    pub full_name: &'static str,
    pub aliases: &'static [&'static str],
    pub category: Category,
    pub composition: Option<MetricComposition>,
    pub direct: Option<DirectFormula>,
    pub variants: &'static [Variant],
    /// Grid coordinate; for direct-only metrics this is the printed one.
    pub cell: Option<Cell>,
    /// Exponent annotation shown in the chart.
    pub exponent_c: Option<i32>,
    pub chart: ChartPlacement,
    pub dimension: Dimension,
    pub requires: Requirement,
    pub status: Status,
    pub notes: &'static str,
}

impl MetricDefinition {
    pub fn is_implemented(&self) -> bool {
        self.status == Status::Implemented
    }

    pub fn supports(&self, variant: Variant) -> bool {
        self.variants.contains(&variant)
    }

    pub fn check_variant(&self, variant: Option<Variant>) -> Result<()> {
        match variant {
            Some(v) if !self.supports(v) => Err(MetricError::UnsupportedVariant {
                metric: self.abbreviation.into(),
                variant: v.to_string(),
            }),
            _ => Ok(()),
        }
    }

    /// The composition realizing `variant`, or `None` when that variant is
    /// only available as a direct formula (ratio-of-aggregates forms).
    pub fn composition_for(&self, variant: Option<Variant>) -> Result<Option<MetricComposition>> {
        self.check_variant(variant)?;
        let Some(base) = self.composition.clone() else {
            return Ok(None);
        };
        Ok(match variant {
            None | Some(Variant::Option1) | Some(Variant::MeanDenominator) => Some(base),
            Some(Variant::Option2) => None,
            Some(Variant::AbsoluteDenominator) => {
                let mut comp = base;
                comp.normalizer = comp.normalizer.absolute();
                Some(comp)
            }
            Some(Variant::Conventional) => {
                let mut comp = base;
                comp.post_transforms = vec![PostTransform::Sqrt, PostTransform::Scale(100.0)];
                Some(comp)
            }
        })
    }

    fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        std::iter::once(self.abbreviation).chain(self.aliases.iter().copied())
    }
}

/// One machine-readable catalog record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogRecord {
    pub abbreviation: String,
    pub name: String,
    pub aliases: Vec<String>,
    pub category: Category,
    pub cell: Option<String>,
    pub exponent_c: Option<i32>,
    pub composition: Option<String>,
    pub dimension: Dimension,
    pub variants: Vec<String>,
    pub requires: Requirement,
    pub implemented: bool,
    pub notes: String,
}

impl From<&MetricDefinition> for CatalogRecord {
    fn from(d: &MetricDefinition) -> Self {
        let notes = match d.status {
            Status::OutOfScope { reason } => reason.to_string(),
            Status::Implemented => d.notes.to_string(),
        };
        Self {
            abbreviation: d.abbreviation.into(),
            name: d.full_name.into(),
            aliases: d.aliases.iter().map(|s| s.to_string()).collect(),
            category: d.category,
            cell: d.cell.map(|c| c.to_string()),
            exponent_c: d.exponent_c,
            composition: d.composition.as_ref().map(ToString::to_string),
            dimension: d.dimension,
            variants: d.variants.iter().map(ToString::to_string).collect(),
            requires: d.requires,
            implemented: d.is_implemented(),
            notes,
        }
    }
}

/// Filter for [`Registry::list`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ListFilter {
    pub category: Option<Category>,
    pub cell: Option<Cell>,
    pub implemented_only: bool,
}

/// The immutable metric catalog.
pub struct Registry {
    definitions: Vec<MetricDefinition>,
}

static GLOBAL: OnceLock<Registry> = OnceLock::new();

impl Registry {
    /// The process-wide catalog, built on first use.
    pub fn global() -> &'static Registry {
        GLOBAL.get_or_init(|| Registry::from_definitions(catalog::definitions()))
    }

    pub fn from_definitions(mut definitions: Vec<MetricDefinition>) -> Self {
        definitions.sort_by_key(|d| d.abbreviation.to_ascii_lowercase());
        Self { definitions }
    }

    pub fn definitions(&self) -> &[MetricDefinition] {
        &self.definitions
    }

    /// Case-insensitive lookup on abbreviation or alias.
    pub fn lookup(&self, name: &str) -> Result<&MetricDefinition> {
        let wanted = name.trim();
        self.definitions
            .iter()
            .find(|d| d.names().any(|n| n.eq_ignore_ascii_case(wanted)))
            .ok_or_else(|| MetricError::UnknownMetric {
                name: wanted.to_string(),
                suggestions: self.suggest(wanted),
            })
    }

    fn suggest(&self, name: &str) -> Vec<String> {
        let wanted = name.to_ascii_lowercase();
        let mut scored: Vec<(usize, &str)> = self
            .definitions
            .iter()
            .flat_map(|d| d.names().map(move |n| (n, d.abbreviation)))
            .filter_map(|(n, abbr)| {
                let dist = strsim::levenshtein(&wanted, &n.to_ascii_lowercase());
                (dist <= 2).then_some((dist, abbr))
            })
            .collect();
        scored.sort();
        let mut out: Vec<String> = Vec::new();
        for (_, abbr) in scored {
            if !out.iter().any(|s| s == abbr) {
                out.push(abbr.to_string());
            }
            if out.len() == 3 {
                break;
            }
        }
        out
    }

    /// Definitions in alphabetical order, optionally filtered.
    pub fn list(&self, filter: ListFilter) -> Vec<&MetricDefinition> {
        self.definitions
            .iter()
            .filter(|d| filter.category.is_none_or(|c| d.category == c))
            .filter(|d| {
                filter
                    .cell
                    .is_none_or(|c| d.composition.as_ref().map(|k| k.cell()) == Some(c))
            })
            .filter(|d| !filter.implemented_only || d.is_implemented())
            .collect()
    }

    pub fn catalog_records(&self) -> Vec<CatalogRecord> {
        self.definitions.iter().map(CatalogRecord::from).collect()
    }

    fn implemented(&self, name: &str) -> Result<&MetricDefinition> {
        let def = self.lookup(name)?;
        if let Status::OutOfScope { reason } = def.status {
            return Err(MetricError::Unimplemented {
                metric: def.abbreviation.into(),
                reason: reason.into(),
            });
        }
        if def.requires != Requirement::None {
            return Err(MetricError::RequiresBenchmark {
                metric: def.abbreviation.into(),
            });
        }
        Ok(def)
    }

    /// Evaluates a self-contained metric by name: through its composition
    /// when it has one, otherwise through its direct formula.
    pub fn evaluate_named(
        &self,
        pair: &SeriesPair,
        name: &str,
        policy: &EvaluationPolicy,
        variant: Option<Variant>,
    ) -> Result<MetricResult> {
        let def = self.implemented(name)?;
        if def.category != Category::Primary {
            def.check_variant(variant)?;
            if let Some(result) =
                crate::derived::evaluate_derived(pair, def.abbreviation, def.category, policy)
            {
                return result;
            }
        }
        if let Some(comp) = def.composition_for(variant)? {
            let mut result = evaluator::evaluate(pair, &comp, policy)?;
            result.dimension = def.dimension;
            return Ok(result);
        }
        let direct = def.direct.ok_or_else(|| MetricError::Unimplemented {
            metric: def.abbreviation.into(),
            reason: "no evaluation route".into(),
        })?;
        let out = direct(pair, policy, variant)?;
        Ok(MetricResult {
            value: out.value,
            dimension: def.dimension,
            points_total: pair.len(),
            points_skipped: out.skipped,
            degenerate: !out.actions.is_empty() || !out.value.is_finite(),
            policy_actions: out.actions,
        })
    }

    /// The metric's closed-form definition, bypassing any composition.
    pub fn direct_formula(
        &self,
        name: &str,
        pair: &SeriesPair,
        policy: &EvaluationPolicy,
        variant: Option<Variant>,
    ) -> Result<f64> {
        let def = self.implemented(name)?;
        def.check_variant(variant)?;
        let direct = def.direct.ok_or_else(|| MetricError::Unimplemented {
            metric: def.abbreviation.into(),
            reason: "no direct formula".into(),
        })?;
        Ok(direct(pair, policy, variant)?.value)
    }
}

/// Shorthand for [`Registry::global`]`.lookup(name)`.
pub fn lookup(name: &str) -> Result<&'static MetricDefinition> {
    Registry::global().lookup(name)
}

pub fn evaluate_named(
    pair: &SeriesPair,
    name: &str,
    policy: &EvaluationPolicy,
    variant: Option<Variant>,
) -> Result<MetricResult> {
    Registry::global().evaluate_named(pair, name, policy, variant)
}

pub fn direct_formula(
    name: &str,
    pair: &SeriesPair,
    policy: &EvaluationPolicy,
    variant: Option<Variant>,
) -> Result<f64> {
    Registry::global().direct_formula(name, pair, policy, variant)
}

pub fn list_metrics(filter: ListFilter) -> Vec<&'static MetricDefinition> {
    Registry::global().list(filter)
}
