//! The typology chart: point distance x aggregator rows against normalizer
//! columns, populated from the catalog, with blank-cell discovery and text
//! renderers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{MetricError, Result};
use crate::registry::{Category, ChartPlacement, MetricDefinition};
use crate::types::{AggregatorKind, DistanceKind, NormalizerKind, PostTransform};

/// Normalizer columns of the chart; max and min share the fifth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ChartColumn {
    N1,
    N2,
    N3,
    N4,
    N5,
}

impl ChartColumn {
    pub const ALL: [ChartColumn; 5] = [
        ChartColumn::N1,
        ChartColumn::N2,
        ChartColumn::N3,
        ChartColumn::N4,
        ChartColumn::N5,
    ];

    pub fn of(kind: NormalizerKind) -> Self {
        match kind {
            NormalizerKind::Unitary => ChartColumn::N1,
            NormalizerKind::ByActuals => ChartColumn::N2,
            NormalizerKind::ByVariabilityOfActuals => ChartColumn::N3,
            NormalizerKind::BySumActualPredicted => ChartColumn::N4,
            NormalizerKind::ByMaxActualPredicted | NormalizerKind::ByMinActualPredicted => {
                ChartColumn::N5
            }
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            ChartColumn::N1 => "N1 = 1 (unitary)",
            ChartColumn::N2 => "N2 = A_j^-c (by actuals)",
            ChartColumn::N3 => "N3 = (A_j - mean A)^-c (by variability)",
            ChartColumn::N4 => "N4 = (A_j + P_j)^-c (by sum)",
            ChartColumn::N5 => "N5 = [max|min(A_j, P_j)]^-c",
        }
    }

    fn code(self) -> &'static str {
        match self {
            ChartColumn::N1 => "N1",
            ChartColumn::N2 => "N2",
            ChartColumn::N3 => "N3",
            ChartColumn::N4 => "N4",
            ChartColumn::N5 => "N5",
        }
    }

    /// Representative normalizer, used for blank-cell formulas.
    fn representative(self) -> NormalizerKind {
        match self {
            ChartColumn::N1 => NormalizerKind::Unitary,
            ChartColumn::N2 => NormalizerKind::ByActuals,
            ChartColumn::N3 => NormalizerKind::ByVariabilityOfActuals,
            ChartColumn::N4 => NormalizerKind::BySumActualPredicted,
            ChartColumn::N5 => NormalizerKind::ByMaxActualPredicted,
        }
    }
}

/// Core-grid coordinate: distance, normalizer column, core aggregator row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GridCoord {
    pub distance: DistanceKind,
    pub aggregator_row: usize,
    pub column: ChartColumn,
}

impl GridCoord {
    pub fn new(
        distance: DistanceKind,
        column: ChartColumn,
        aggregator: AggregatorKind,
    ) -> Option<Self> {
        aggregator.core_index().map(|aggregator_row| Self {
            distance,
            aggregator_row,
            column,
        })
    }

    pub fn aggregator(&self) -> AggregatorKind {
        AggregatorKind::CORE[self.aggregator_row]
    }
}

impl std::fmt::Display for GridCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.distance,
            self.column.code(),
            self.aggregator()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occupant {
    pub abbreviation: String,
    pub normalizer: NormalizerKind,
    pub exponent_c: Option<i32>,
    /// 1 for a cell's own metric, 2 for a post-transformed alias.
    pub line: u8,
    /// Text as it appears in the cell, e.g. `MSPE c=2` or `RMSE=sqrt(MSE)`.
    pub label: String,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnexEntry {
    pub abbreviation: String,
    pub distance: Option<DistanceKind>,
    pub normalizer: Option<NormalizerKind>,
    pub aggregator: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChartGrid {
    cells: BTreeMap<GridCoord, Vec<Occupant>>,
    annex: Vec<AnnexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlankCell {
    pub coord: GridCoord,
    /// The generic formula instantiated at this cell.
    pub formula: String,
}

/// Claim key: two occupants colliding on this are a catalog bug.
type ClaimKey = (GridCoord, NormalizerKind, Option<i32>, String);

fn claim_key(coord: GridCoord, def: &MetricDefinition) -> ClaimKey {
    let transforms = def
        .composition
        .as_ref()
        .map(|c| format!("{:?}/{:?}", c.point_transform, c.post_transforms))
        .unwrap_or_else(|| "direct".into());
    let kind = def
        .cell
        .map(|c| c.normalizer)
        .unwrap_or(NormalizerKind::Unitary);
    (
        coord,
        kind,
        def.exponent_c
            .or(def.composition.as_ref().map(|c| c.normalizer.exponent_c)),
        transforms,
    )
}

fn main_label(def: &MetricDefinition, kind: NormalizerKind) -> String {
    let mut label = def.abbreviation.to_string();
    if let Some(c) = def.exponent_c {
        let _ = write!(label, " c={c}");
    }
    match kind {
        NormalizerKind::ByMaxActualPredicted => label.push_str(" max"),
        NormalizerKind::ByMinActualPredicted => label.push_str(" min"),
        _ => {}
    }
    label
}

fn alias_label(def: &MetricDefinition, of: &MetricDefinition) -> String {
    let extra = match (&def.composition, &of.composition) {
        (Some(a), Some(b)) if a.post_transforms.len() > b.post_transforms.len() => {
            a.post_transforms.last().copied()
        }
        _ => None,
    };
    match extra {
        Some(PostTransform::Sqrt) => format!("{}=sqrt({})", def.abbreviation, of.abbreviation),
        Some(PostTransform::Scale(k)) => format!("{}={}{}", def.abbreviation, k, of.abbreviation),
        _ => def.abbreviation.to_string(),
    }
}

/// Places every primary definition of `catalog` on the grid or in the annex.
pub fn build_chart(catalog: &[MetricDefinition]) -> Result<ChartGrid> {
    let mut grid = ChartGrid::default();
    let mut claims: BTreeMap<ClaimKey, &str> = BTreeMap::new();

    for def in catalog
        .iter()
        .filter(|d| d.category == Category::Primary && d.is_implemented())
    {
        let annex = |note: &str| AnnexEntry {
            abbreviation: def.abbreviation.to_string(),
            distance: def.cell.map(|c| c.distance),
            normalizer: def.cell.map(|c| c.normalizer),
            aggregator: def.cell.map(|c| c.aggregator.label().to_string()),
            note: note.to_string(),
        };
        let (cell, line, label, note) = match def.chart {
            ChartPlacement::Hidden => continue,
            ChartPlacement::Annex { note } => {
                grid.annex.push(annex(note));
                continue;
            }
            ChartPlacement::Core | ChartPlacement::AsPrinted | ChartPlacement::Alias { .. } => {
                let Some(cell) = def.cell else {
                    grid.annex.push(annex("no grid coordinate"));
                    continue;
                };
                match def.chart {
                    ChartPlacement::Alias { of } => {
                        let parent = catalog.iter().find(|d| d.abbreviation == of);
                        let label = parent
                            .map_or_else(|| def.abbreviation.to_string(), |p| alias_label(def, p));
                        (cell, 2, label, None)
                    }
                    ChartPlacement::AsPrinted => (
                        cell,
                        1,
                        main_label(def, cell.normalizer),
                        Some("as-printed; evaluated by its direct formula".to_string()),
                    ),
                    _ => (cell, 1, main_label(def, cell.normalizer), None),
                }
            }
        };
        let Some(coord) = GridCoord::new(
            cell.distance,
            ChartColumn::of(cell.normalizer),
            cell.aggregator,
        ) else {
            grid.annex
                .push(annex("aggregator outside the four core rows"));
            continue;
        };
        let key = claim_key(coord, def);
        if let Some(first) = claims.insert(key, def.abbreviation) {
            return Err(MetricError::DuplicateCellClaim {
                first: first.to_string(),
                second: def.abbreviation.to_string(),
            });
        }
        grid.cells.entry(coord).or_default().push(Occupant {
            abbreviation: def.abbreviation.to_string(),
            normalizer: cell.normalizer,
            exponent_c: def.exponent_c,
            line,
            label,
            note,
        });
    }
    for occupants in grid.cells.values_mut() {
        occupants.sort_by(|a, b| (a.line, &a.abbreviation).cmp(&(b.line, &b.abbreviation)));
    }
    grid.annex.sort_by_key(|a| a.abbreviation.to_lowercase());
    Ok(grid)
}

impl ChartGrid {
    /// All core coordinates, distance-major then aggregator row then column.
    pub fn coordinates() -> impl Iterator<Item = GridCoord> {
        DistanceKind::ALL.into_iter().flat_map(|distance| {
            (0..4).flat_map(move |aggregator_row| {
                ChartColumn::ALL.into_iter().map(move |column| GridCoord {
                    distance,
                    aggregator_row,
                    column,
                })
            })
        })
    }

    pub fn occupied(&self) -> impl Iterator<Item = (&GridCoord, &Vec<Occupant>)> {
        self.cells.iter()
    }

    pub fn annex(&self) -> &[AnnexEntry] {
        &self.annex
    }

    pub fn at(&self, coord: &GridCoord) -> &[Occupant] {
        self.cells.get(coord).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Occupants at a cell addressed by normalizer kind; N5-max and N5-min
    /// select their half of the shared column.
    pub fn occupants(
        &self,
        distance: DistanceKind,
        normalizer: NormalizerKind,
        aggregator: AggregatorKind,
    ) -> Vec<&Occupant> {
        let Some(coord) = GridCoord::new(distance, ChartColumn::of(normalizer), aggregator) else {
            return Vec::new();
        };
        self.at(&coord)
            .iter()
            .filter(|o| o.normalizer == normalizer)
            .collect()
    }

    pub fn occupancy_count(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }
}

fn aggregator_formula(g: AggregatorKind) -> &'static str {
    match g {
        AggregatorKind::Mean => "mean_j",
        AggregatorKind::Median => "median_j",
        AggregatorKind::GeometricMean => "geomean_j",
        AggregatorKind::Sum => "sum_j",
        _ => "agg_j",
    }
}

/// `G{N[D(A_j, P_j)]}` written out for one coordinate.
pub fn generic_formula(coord: &GridCoord) -> String {
    let d = coord.distance.formula();
    let inner = match coord.column.representative().base_formula(false) {
        None => d.to_string(),
        Some(_) if coord.column == ChartColumn::N5 => format!("{d} / [max|min(A_j, P_j)]^c"),
        Some(base) => format!("{d} / {base}^c"),
    };
    format!("{}[ {inner} ]", aggregator_formula(coord.aggregator()))
}

/// Unclaimed core cells, in [`ChartGrid::coordinates`] order.
pub fn blank_cells(grid: &ChartGrid) -> Vec<BlankCell> {
    ChartGrid::coordinates()
        .filter(|c| grid.at(c).is_empty())
        .map(|coord| BlankCell {
            formula: generic_formula(&coord),
            coord,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartFormat {
    PlainTable,
    DelimitedValues,
    MarkupDocument,
}

impl std::str::FromStr for ChartFormat {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plain" | "table" | "text" => Ok(ChartFormat::PlainTable),
            "delimited" | "csv" => Ok(ChartFormat::DelimitedValues),
            "markdown" | "md" | "markup" => Ok(ChartFormat::MarkupDocument),
            other => Err(MetricError::InvalidSpec(format!(
                "unknown chart format '{other}'"
            ))),
        }
    }
}

fn cell_text(occupants: &[Occupant]) -> String {
    occupants
        .iter()
        .map(|o| o.label.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

fn table_rows(grid: &ChartGrid) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for distance in DistanceKind::ALL {
        for (row, aggregator) in AggregatorKind::CORE.into_iter().enumerate() {
            let mut cols = vec![if row == 0 {
                format!(
                    "{} {} = {}",
                    distance.code(),
                    distance.label(),
                    distance.formula()
                )
            } else {
                String::new()
            }];
            for column in ChartColumn::ALL {
                let coord = GridCoord {
                    distance,
                    aggregator_row: row,
                    column,
                };
                cols.push(cell_text(grid.at(&coord)));
            }
            cols.push(format!("{} {}", aggregator.code(), aggregator.label()));
            rows.push(cols);
        }
    }
    rows
}

fn header() -> Vec<String> {
    let mut h = vec!["Point distance".to_string()];
    h.extend(ChartColumn::ALL.iter().map(|c| c.header().to_string()));
    h.push("Aggregation".to_string());
    h
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the grid. Output depends only on the grid contents.
pub fn render_chart(grid: &ChartGrid, format: ChartFormat) -> String {
    let mut out = String::new();
    match format {
        ChartFormat::PlainTable => {
            let header = header();
            let rows = table_rows(grid);
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    rows.iter()
                        .map(|r| r[i].chars().count())
                        .chain(std::iter::once(header[i].chars().count()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cols: &[String]| -> String {
                let padded: Vec<String> = cols
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}", w = *w))
                    .collect();
                format!("| {} |", padded.join(" | ")).trim_end().to_string()
            };
            let rule: String = format!(
                "+{}+",
                widths
                    .iter()
                    .map(|w| "-".repeat(w + 2))
                    .collect::<Vec<_>>()
                    .join("+")
            );
            let _ = writeln!(out, "{rule}");
            let _ = writeln!(out, "{}", line(&header));
            let _ = writeln!(out, "{rule}");
            for block in rows.chunks(4) {
                for r in block {
                    let _ = writeln!(out, "{}", line(r));
                }
                let _ = writeln!(out, "{rule}");
            }
            if !grid.annex.is_empty() {
                let _ = writeln!(out, "\nAnnex (outside the core grid):");
                for a in &grid.annex {
                    let _ = writeln!(out, "  {:<8} {}", a.abbreviation, annex_text(a));
                }
            }
        }
        ChartFormat::DelimitedValues => {
            let _ = writeln!(
                out,
                "distance,normalizer,aggregator,metric,exponent_c,line,note"
            );
            for (coord, occupants) in &grid.cells {
                for o in occupants {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        coord.distance,
                        o.normalizer,
                        coord.aggregator(),
                        csv_field(&o.label),
                        o.exponent_c.map(|c| c.to_string()).unwrap_or_default(),
                        o.line,
                        csv_field(o.note.as_deref().unwrap_or(""))
                    );
                }
            }
            for a in &grid.annex {
                let _ = writeln!(
                    out,
                    "{},{},{},{},,annex,{}",
                    a.distance.map(|d| d.to_string()).unwrap_or_default(),
                    a.normalizer.map(|n| n.to_string()).unwrap_or_default(),
                    csv_field(a.aggregator.as_deref().unwrap_or("")),
                    a.abbreviation,
                    csv_field(&a.note)
                );
            }
        }
        ChartFormat::MarkupDocument => {
            let _ = writeln!(out, "# Error metric typology chart\n");
            let header = header();
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for r in table_rows(grid) {
                let cells: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            if !grid.annex.is_empty() {
                let _ = writeln!(out, "\n## Annex\n");
                for a in &grid.annex {
                    let _ = writeln!(out, "- **{}**: {}", a.abbreviation, annex_text(a));
                }
            }
        }
    }
    out
}

fn annex_text(a: &AnnexEntry) -> String {
    let mut s = String::new();
    if let (Some(d), Some(n), Some(g)) = (a.distance, a.normalizer, &a.aggregator) {
        let _ = write!(s, "({d}, {n}, {g}) ");
    }
    s.push_str(&a.note);
    s
}

/// Renders the blank-cell list, one line per cell.
pub fn render_blanks(blanks: &[BlankCell]) -> String {
    let mut out = String::new();
    for b in blanks {
        let _ = writeln!(out, "{}  {}", b.coord, b.formula);
    }
    out
}
