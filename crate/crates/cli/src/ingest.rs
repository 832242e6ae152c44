//! Reading actual/predicted series from CSV or JSON files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use typometrics::{MetricError, SeriesPair};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    FileAccess {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    ParseLine {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: key '{key}': {message}")]
    ParseKey {
        path: PathBuf,
        key: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: MetricError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// `.json` files are JSON, anything else CSV.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

/// Which columns (CSV) or keys (JSON) hold each series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMapping {
    pub actual: String,
    pub predicted: String,
    pub benchmark: Option<String>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            actual: "actual".into(),
            predicted: "predicted".into(),
            benchmark: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub pair: SeriesPair,
    /// The benchmark method's predictions paired with the same actuals.
    pub benchmark: Option<SeriesPair>,
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::FileAccess {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the named columns; extra columns are ignored.
pub fn read_columns(
    path: &Path,
    format: InputFormat,
    names: &[&str],
) -> Result<Vec<Vec<f64>>, IngestError> {
    let text = read(path)?;
    match format {
        InputFormat::Csv => csv_columns(path, &text, names),
        InputFormat::Json => json_columns(path, &text, names),
    }
}

fn csv_columns(path: &Path, text: &str, names: &[&str]) -> Result<Vec<Vec<f64>>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let malformed = |message: String| IngestError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| malformed(format!("no column named '{name}' in header")))
        })
        .collect::<Result<_, _>>()?;
    let mut columns = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::ParseLine {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for (col, &i) in columns.iter_mut().zip(&idx) {
            let field = record.get(i).unwrap_or("");
            let value = field.parse::<f64>().map_err(|_| IngestError::ParseLine {
                path: path.to_path_buf(),
                line,
                message: format!("'{field}' in column '{}' is not a number", &headers[i]),
            })?;
            col.push(value);
        }
    }
    Ok(columns)
}

fn json_columns(path: &Path, text: &str, names: &[&str]) -> Result<Vec<Vec<f64>>, IngestError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IngestError::ParseLine {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })?;
    let object = doc.as_object().ok_or_else(|| IngestError::Malformed {
        path: path.to_path_buf(),
        message: "top level must be an object of arrays".into(),
    })?;
    let key_err = |key: &str, message: String| IngestError::ParseKey {
        path: path.to_path_buf(),
        key: key.to_string(),
        message,
    };
    names
        .iter()
        .map(|name| {
            let array = object
                .get(*name)
                .ok_or_else(|| key_err(name, "missing".into()))?
                .as_array()
                .ok_or_else(|| key_err(name, "not an array".into()))?;
            array
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_f64()
                        .ok_or_else(|| key_err(name, format!("element {i} is not a number")))
                })
                .collect()
        })
        .collect()
}

/// Reads one input file into a validated pair, plus the benchmark pair when
/// a benchmark column is mapped.
pub fn ingest(
    path: &Path,
    format: InputFormat,
    mapping: &ColumnMapping,
) -> Result<Ingested, IngestError> {
    let mut names = vec![mapping.actual.as_str(), mapping.predicted.as_str()];
    names.extend(mapping.benchmark.as_deref());
    let mut columns = read_columns(path, format, &names)?.into_iter();
    let actuals = columns.next().unwrap_or_default();
    let predicted = columns.next().unwrap_or_default();
    let invalid = |source| IngestError::Invalid {
        path: path.to_path_buf(),
        source,
    };
    let benchmark = columns
        .next()
        .map(|b| SeriesPair::new(actuals.clone(), b).map_err(invalid))
        .transpose()?;
    let pair = SeriesPair::new(actuals, predicted).map_err(invalid)?;
    Ok(Ingested { pair, benchmark })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(ext: &str, body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn csv_example() {
        let f = file(".csv", "actual,predicted\n1,2\n2,2\n3,5\n4,3");
        let got = ingest(f.path(), InputFormat::Csv, &ColumnMapping::default()).unwrap();
        assert_eq!(got.pair.actuals(), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(got.pair.predicted(), [2.0, 2.0, 5.0, 3.0]);
        assert!(got.benchmark.is_none());
    }

    #[test]
    fn header_only_is_empty_series() {
        let f = file(".csv", "actual,predicted\n");
        let err = ingest(f.path(), InputFormat::Csv, &ColumnMapping::default()).unwrap_err();
        assert!(matches!(
            err,
            IngestError::Invalid {
                source: MetricError::EmptySeries,
                ..
            }
        ));
    }

    #[test]
    fn bad_number_names_its_line() {
        let f = file(".csv", "actual,predicted\n1,2\n2,2\n3,abc\n");
        match ingest(f.path(), InputFormat::Csv, &ColumnMapping::default()).unwrap_err() {
            IngestError::ParseLine { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn columns_found_by_name_in_any_order() {
        let f = file(".csv", "id,predicted,naive,actual\na,2,1,1\nb,3,2,2\n");
        let mapping = ColumnMapping {
            benchmark: Some("naive".into()),
            ..ColumnMapping::default()
        };
        let got = ingest(f.path(), InputFormat::Csv, &mapping).unwrap();
        assert_eq!(got.pair.actuals(), [1.0, 2.0]);
        assert_eq!(got.benchmark.unwrap().predicted(), [1.0, 2.0]);
    }

    #[test]
    fn json_object_of_arrays() {
        let f = file(".json", r#"{"actual": [1, 2], "predicted": [2, 4]}"#);
        assert_eq!(InputFormat::detect(f.path()), InputFormat::Json);
        let got = ingest(f.path(), InputFormat::Json, &ColumnMapping::default()).unwrap();
        assert_eq!(got.pair.predicted(), [2.0, 4.0]);
        let f = file(".json", r#"{"actual": [1, 2], "predicted": [2, "x"]}"#);
        let err = ingest(f.path(), InputFormat::Json, &ColumnMapping::default()).unwrap_err();
        assert!(matches!(err, IngestError::ParseKey { ref key, .. } if key == "predicted"));
    }

    #[test]
    fn missing_file_is_file_access() {
        let err = ingest(
            Path::new("/no/such/file.csv"),
            InputFormat::Csv,
            &ColumnMapping::default(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::FileAccess { .. }));
    }
}
