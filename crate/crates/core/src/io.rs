//! Reading and writing experiments as JSON or CSV.
//!
//! JSON: `{"labels": ["p1", "p2"], "columns": [[...], [...]]}` with `labels`
//! optional. CSV: a header row of labels followed by one row per outcome.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::Experiment;

#[derive(Debug, Serialize, Deserialize)]
struct ExperimentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    columns: Vec<Vec<f64>>,
}

fn attach_labels(e: Experiment, labels: Option<Vec<String>>) -> Result<Experiment> {
    match labels {
        Some(l) => e.with_labels(l),
        None => Ok(e),
    }
}

/// Parses the JSON experiment format.
pub fn experiment_from_json(text: &str) -> Result<Experiment> {
    let file: ExperimentFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    attach_labels(Experiment::from_columns(&file.columns)?, file.labels)
}

/// JSON value for the canonical form of `e`.
pub fn experiment_to_json_value(e: &Experiment) -> serde_json::Value {
    let file = ExperimentFile { labels: e.labels().map(<[String]>::to_vec), columns: e.columns() };
    serde_json::to_value(file).expect("experiment serializes")
}

/// Parses the CSV experiment format.
pub fn experiment_from_csv(text: &str) -> Result<Experiment> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let d = labels.len();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {s:?}: {e}", line + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    attach_labels(Experiment::from_rows(d, &rows)?, Some(labels))
}

/// CSV text for the canonical form of `e`, floats written with 17 significant digits.
pub fn experiment_to_csv(e: &Experiment) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let labels: Vec<String> = match e.labels() {
        Some(l) => l.to_vec(),
        None => (1..=e.n_cols()).map(|k| format!("p{k}")).collect(),
    };
    let csv_err = |err: csv::Error| Error::Parse(err.to_string());
    w.write_record(&labels).map_err(csv_err)?;
    for r in e.rows() {
        w.write_record(r.iter().map(|x| crate::report::format_float(*x))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|err| Error::Parse(err.to_string()))?;
    String::from_utf8(bytes).map_err(|err| Error::Parse(err.to_string()))
}
