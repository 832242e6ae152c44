//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use typometrics::derived::SuiteDefinition;
use typometrics::registry::Requirement;
use typometrics::{
    builtin_suites, EpsilonRule, EvaluationPolicy, LogRatioPolicy, MetricComposition, Registry,
    SuiteMember, ZeroDenominatorPolicy,
};

use crate::ingest::{ColumnMapping, InputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ZeroMode {
    Fail,
    Skip,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LogMode {
    Fail,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
    Delimited,
}

/// Flags of the `eval` verb. Every flag overrides its config-file key.
#[derive(Debug, Clone, Default, Args)]
pub struct EvalArgs {
    /// Input files (CSV with a header row, or JSON object of arrays).
    pub inputs: Vec<PathBuf>,
    /// TOML config file; flags take precedence over its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input format; by default `.json` files are JSON and the rest CSV.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
    /// Column (or JSON key) holding the actual values [default: actual].
    #[arg(long)]
    pub actual: Option<String>,
    /// Column (or JSON key) holding the predictions [default: predicted].
    #[arg(long)]
    pub predicted: Option<String>,
    /// Column holding a benchmark method's predictions, for relative metrics.
    #[arg(long)]
    pub benchmark: Option<String>,
    /// File of in-sample actuals, for MASE.
    #[arg(long)]
    pub in_sample: Option<PathBuf>,
    /// Column (or key) of the in-sample file [default: the actual column].
    #[arg(long)]
    pub in_sample_column: Option<String>,
    /// Metric names, optionally with a variant (`RAE:option2`). Repeatable or comma separated.
    #[arg(short, long = "metric", value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Suite names (built-in or from the config file).
    #[arg(short, long = "suite", value_delimiter = ',')]
    pub suites: Vec<String>,
    /// Ad-hoc composition, e.g. "distance=D4 normalizer=N1 aggregator=G1".
    #[arg(long = "compose")]
    pub compositions: Vec<String>,
    #[arg(long, value_enum)]
    pub on_zero_denominator: Option<ZeroMode>,
    /// Epsilon for `--on-zero-denominator epsilon`: a positive number or `smallest-nonzero`.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long, value_enum)]
    pub on_log_ratio: Option<LogMode>,
    #[arg(short, long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// The config file. Relative paths are taken from the file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub inputs: Vec<PathBuf>,
    pub input_format: Option<InputFormat>,
    pub actual: Option<String>,
    pub predicted: Option<String>,
    pub benchmark: Option<String>,
    pub in_sample: Option<PathBuf>,
    pub in_sample_column: Option<String>,
    pub metrics: Vec<String>,
    pub suites: Vec<String>,
    pub compose: Vec<String>,
    pub on_zero_denominator: Option<ZeroMode>,
    pub epsilon: Option<String>,
    pub on_log_ratio: Option<LogMode>,
    pub output: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    /// User suites: `[[suite]] name = "..." members = [...]`.
    #[serde(rename = "suite")]
    pub custom_suites: Vec<SuiteDefinition>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.inputs.iter_mut().for_each(rebase);
        cfg.in_sample.as_mut().map(rebase);
        for s in &cfg.custom_suites {
            s.validate()
                .with_context(|| format!("suite '{}' in {}", s.name, path.display()))?;
        }
        Ok(cfg)
    }
}

/// Every suite the run can name: built-ins first, then config suites,
/// which may shadow a built-in of the same name.
pub fn all_suites(config: &FileConfig) -> Vec<SuiteDefinition> {
    let mut suites: Vec<SuiteDefinition> = builtin_suites()
        .into_iter()
        .filter(|b| {
            !config
                .custom_suites
                .iter()
                .any(|c| c.name.eq_ignore_ascii_case(&b.name))
        })
        .collect();
    suites.extend(config.custom_suites.iter().cloned());
    suites
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Named(SuiteMember),
    Composed {
        label: String,
        composition: MetricComposition,
    },
}

impl Selection {
    pub fn label(&self) -> String {
        match self {
            Selection::Named(m) => m.to_string(),
            Selection::Composed { label, .. } => label.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub input_format: Option<InputFormat>,
    pub mapping: ColumnMapping,
    pub in_sample: Option<(PathBuf, String)>,
    pub selections: Vec<Selection>,
    pub policy: EvaluationPolicy,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
}

fn parse_epsilon(text: &str) -> anyhow::Result<EpsilonRule> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("smallest-nonzero") {
        return Ok(EpsilonRule::SmallestNonzeroActual);
    }
    let v: f64 = t.parse().with_context(|| {
        format!("--epsilon takes a positive number or 'smallest-nonzero', got '{t}'")
    })?;
    if !(v.is_finite() && v > 0.0) {
        bail!("epsilon must be positive and finite, got {v}");
    }
    Ok(EpsilonRule::FixedValue(v))
}

fn policy(
    zero: Option<ZeroMode>,
    epsilon: Option<&str>,
    log: Option<LogMode>,
) -> anyhow::Result<EvaluationPolicy> {
    let rule = epsilon.map(parse_epsilon).transpose()?;
    let zero_denominator = match (zero, rule) {
        (None | Some(ZeroMode::Epsilon), Some(rule)) => ZeroDenominatorPolicy::EpsilonCorrect(rule),
        (Some(ZeroMode::Epsilon), None) => {
            ZeroDenominatorPolicy::EpsilonCorrect(EpsilonRule::SmallestNonzeroActual)
        }
        (Some(mode), Some(_)) => bail!("--epsilon conflicts with --on-zero-denominator {mode:?}"),
        (None | Some(ZeroMode::Fail), None) => ZeroDenominatorPolicy::Fail,
        (Some(ZeroMode::Skip), None) => ZeroDenominatorPolicy::SkipPoint,
    };
    let nonpositive_log_ratio = match log {
        Some(LogMode::Skip) => LogRatioPolicy::SkipPoint,
        _ => LogRatioPolicy::Fail,
    };
    Ok(EvaluationPolicy {
        zero_denominator,
        nonpositive_log_ratio,
    })
}

impl RunConfig {
    /// Merges flags over the config file and validates the result.
    pub fn resolve(args: EvalArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let inputs = if args.inputs.is_empty() {
            file.inputs.clone()
        } else {
            args.inputs
        };
        if inputs.is_empty() {
            bail!("no input files given");
        }
        let mapping = ColumnMapping {
            actual: args
                .actual
                .or(file.actual.clone())
                .unwrap_or_else(|| "actual".into()),
            predicted: args
                .predicted
                .or(file.predicted.clone())
                .unwrap_or_else(|| "predicted".into()),
            benchmark: args.benchmark.or(file.benchmark.clone()),
        };
        let in_sample = args.in_sample.or(file.in_sample.clone()).map(|p| {
            let column = args
                .in_sample_column
                .clone()
                .or(file.in_sample_column.clone())
                .unwrap_or_else(|| mapping.actual.clone());
            (p, column)
        });

        // Flags replace the file's selection wholesale rather than extending it.
        let from_flags =
            !(args.metrics.is_empty() && args.suites.is_empty() && args.compositions.is_empty());
        let (metrics, suites, compositions) = if from_flags {
            (args.metrics, args.suites, args.compositions)
        } else {
            (
                file.metrics.clone(),
                file.suites.clone(),
                file.compose.clone(),
            )
        };
        let selections = select(&metrics, &suites, &compositions, &all_suites(&file))?;
        if selections.is_empty() {
            bail!("select at least one metric, suite or composition");
        }
        check_sources(
            &selections,
            mapping.benchmark.is_some(),
            in_sample.is_some(),
        )?;

        let policy = policy(
            args.on_zero_denominator.or(file.on_zero_denominator),
            args.epsilon.as_deref().or(file.epsilon.as_deref()),
            args.on_log_ratio.or(file.on_log_ratio),
        )?;
        Ok(Self {
            inputs,
            input_format: args.input_format.or(file.input_format),
            mapping,
            in_sample,
            selections,
            policy,
            output: args.output.or(file.output).unwrap_or_default(),
            out: args.out.or(file.out),
        })
    }
}

/// Expands names and suites in order, dropping repeats so each metric
/// appears once.
fn select(
    metrics: &[String],
    suites: &[String],
    compositions: &[String],
    known_suites: &[SuiteDefinition],
) -> anyhow::Result<Vec<Selection>> {
    let registry = Registry::global();
    let mut out: Vec<Selection> = Vec::new();
    let mut push = |s: Selection| {
        if !out.iter().any(|o| o.label() == s.label()) {
            out.push(s);
        }
    };
    for m in metrics {
        let member: SuiteMember = m.parse().with_context(|| format!("metric '{m}'"))?;
        let def = registry.lookup(&member.name)?;
        def.check_variant(member.variant)?;
        push(Selection::Named(SuiteMember {
            name: def.abbreviation.to_string(),
            variant: member.variant,
        }));
    }
    for name in suites {
        let suite = known_suites
            .iter()
            .find(|s| s.name.eq_ignore_ascii_case(name))
            .with_context(|| {
                let names: Vec<&str> = known_suites.iter().map(|s| s.name.as_str()).collect();
                format!("unknown suite '{name}' (known: {})", names.join(", "))
            })?;
        for member in &suite.members {
            let def = registry.lookup(&member.name)?;
            push(Selection::Named(SuiteMember {
                name: def.abbreviation.to_string(),
                variant: member.variant,
            }));
        }
    }
    for text in compositions {
        let composition: MetricComposition = text
            .parse()
            .with_context(|| format!("composition '{text}'"))?;
        composition.validate()?;
        push(Selection::Composed {
            label: text.split_whitespace().collect::<Vec<_>>().join(" "),
            composition,
        });
    }
    Ok(out)
}

fn check_sources(
    selections: &[Selection],
    has_benchmark: bool,
    has_in_sample: bool,
) -> anyhow::Result<()> {
    let registry = Registry::global();
    for s in selections {
        let Selection::Named(m) = s else { continue };
        let def = registry.lookup(&m.name)?;
        match def.requires {
            Requirement::BenchmarkPair if !has_benchmark => {
                bail!(
                    "{} needs a benchmark column (--benchmark)",
                    def.abbreviation
                )
            }
            Requirement::InSampleActuals if !has_in_sample => {
                bail!("{} needs in-sample actuals (--in-sample)", def.abbreviation)
            }
            _ => {}
        }
    }
    Ok(())
}
