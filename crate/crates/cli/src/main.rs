//! `typometrics` command-line front end.
//!
//! Exit status: 0 when every selected metric evaluated, 1 when any metric
//! failed (the failure is embedded in the report), 2 on a configuration or
//! ingest problem.

mod config;
mod ingest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use typometrics::registry::ListFilter;
use typometrics::{
    blank_cells, build_chart, parallel, render_chart, BenchmarkInput, Category, Cell, ChartFormat,
    InSampleActuals, Registry,
};

use config::{all_suites, EvalArgs, FileConfig, OutputFormat, RunConfig};
use ingest::InputFormat;

#[derive(Debug, Parser)]
#[command(
    name = "typometrics",
    version,
    about = "Compositional error metrics for predicted vs actual series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChartFormatArg {
    Plain,
    Delimited,
    Markdown,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum ListFormat {
    #[default]
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Evaluate metrics, suites or ad-hoc compositions on data files.
    Eval(EvalArgs),
    /// Print the typology chart.
    Chart {
        #[arg(long, value_enum, default_value = "plain")]
        format: ChartFormatArg,
        /// Append the list of unclaimed cells with their formulas.
        #[arg(long)]
        blanks: bool,
    },
    /// Dump the metric catalog.
    List {
        #[arg(long)]
        category: Option<Category>,
        /// Only metrics composed at this cell, e.g. "D2,N2,G2".
        #[arg(long)]
        cell: Option<Cell>,
        /// Include out-of-scope stubs.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: ListFormat,
    },
    /// Show built-in suites and those defined in a config file.
    Suites {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "human")]
        format: ListFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(args) => return eval(args),
        Command::Chart { format, blanks } => chart(format, blanks),
        Command::List {
            category,
            cell,
            all,
            format,
        } => list(category, cell, all, format),
        Command::Suites { config, format } => suites(config, format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn eval(args: EvalArgs) -> ExitCode {
    let config = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok((text, failures)) => {
            let written = match &config.out {
                Some(path) => std::fs::write(path, &text)
                    .with_context(|| format!("cannot write {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
                Ok(()) if failures > 0 => ExitCode::from(1),
                Ok(()) => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Ingests and evaluates every input, one isolated report per file.
/// Returns the rendered reports and the number of failed metrics.
fn run(config: &RunConfig) -> anyhow::Result<(String, usize)> {
    let mut aux = Vec::new();
    if let Some((path, column)) = &config.in_sample {
        let format = config
            .input_format
            .unwrap_or_else(|| InputFormat::detect(path));
        let values = ingest::read_columns(path, format, &[column])?.remove(0);
        let in_sample = InSampleActuals::new(values)
            .with_context(|| format!("in-sample file {}", path.display()))?;
        aux.push(BenchmarkInput::InSampleActuals(in_sample));
    }
    let outcomes = parallel::map(&config.inputs, |path| {
        let format = config
            .input_format
            .unwrap_or_else(|| InputFormat::detect(path));
        let data = ingest::ingest(path, format, &config.mapping)?;
        let mut aux = aux.clone();
        aux.extend(data.benchmark.map(BenchmarkInput::BenchmarkPair));
        Ok::<_, ingest::IngestError>(report::evaluate_all(
            path.display().to_string(),
            &data.pair,
            &config.selections,
            &aux,
            &config.policy,
        ))
    });
    let reports = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failures = reports.iter().map(report::Report::failures).sum();
    let text = match config.output {
        OutputFormat::Human => report::to_human(&reports),
        OutputFormat::Json => report::to_json(&reports),
        OutputFormat::Delimited => report::to_delimited(&reports),
    };
    Ok((text, failures))
}

fn chart(format: ChartFormatArg, blanks: bool) -> anyhow::Result<()> {
    let grid = build_chart(Registry::global().definitions())?;
    let format = match format {
        ChartFormatArg::Plain => ChartFormat::PlainTable,
        ChartFormatArg::Delimited => ChartFormat::DelimitedValues,
        ChartFormatArg::Markdown => ChartFormat::MarkupDocument,
    };
    print!("{}", render_chart(&grid, format));
    if blanks {
        let cells = blank_cells(&grid);
        println!("\nUnclaimed cells ({}):", cells.len());
        print!("{}", typometrics::chart::render_blanks(&cells));
    }
    Ok(())
}

fn list(
    category: Option<Category>,
    cell: Option<Cell>,
    all: bool,
    format: ListFormat,
) -> anyhow::Result<()> {
    let defs = Registry::global().list(ListFilter {
        category,
        cell,
        implemented_only: !all,
    });
    match format {
        ListFormat::Json => {
            let records: Vec<_> = defs
                .into_iter()
                .map(typometrics::registry::CatalogRecord::from)
                .collect();
            println!("{}", serde_json::to_string_pretty(&records)?);
        }
        ListFormat::Human => {
            for d in &defs {
                let cell = d.cell.map(|c| c.to_string()).unwrap_or_default();
                let stub = if d.is_implemented() {
                    ""
                } else {
                    "  [out of scope]"
                };
                println!(
                    "{:<10} {:<10} {:<22} {:<14} {}{stub}",
                    d.abbreviation, d.category, cell, d.dimension, d.full_name
                );
            }
            println!("{} metrics", defs.len());
        }
    }
    Ok(())
}

fn suites(config: Option<PathBuf>, format: ListFormat) -> anyhow::Result<()> {
    let file = match config {
        Some(path) => FileConfig::load(&path)?,
        None => FileConfig::default(),
    };
    let suites = all_suites(&file);
    match format {
        ListFormat::Json => println!("{}", serde_json::to_string_pretty(&suites)?),
        ListFormat::Human => {
            for s in &suites {
                let members: Vec<String> = s.members.iter().map(ToString::to_string).collect();
                println!("{:<16} {}", s.name, members.join(", "));
                if !s.rationale.is_empty() {
                    println!("{:<16} {}", "", s.rationale);
                }
            }
        }
    }
    Ok(())
}
