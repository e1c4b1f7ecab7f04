//! CSV ingestion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Dataset;

/// Label column given by header name or by position; negative positions
/// count from the end, so `-1` is the last column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(i64),
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Index(-1)
    }
}

impl FromStr for LabelColumn {
    type Err = Error;

    /// Integers select by position, anything else by name.
    fn from_str(s: &str) -> Result<Self> {
        Ok(s.parse::<i64>().map_or_else(|_| LabelColumn::Name(s.to_string()), LabelColumn::Index))
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

impl LabelColumn {
    fn resolve(&self, header: &csv::StringRecord, path: &Path) -> Result<usize> {
        let n = header.len() as i64;
        let err = |message: String| Error::Ingestion { path: path.to_path_buf(), row: 1, column: 0, message };
        match self {
            LabelColumn::Name(name) => header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| err(format!("no column named `{name}`"))),
            LabelColumn::Index(i) => {
                let idx = if *i < 0 { n + i } else { *i };
                if (0..n).contains(&idx) {
                    Ok(idx as usize)
                } else {
                    Err(err(format!("label column index {i} out of range for {n} columns")))
                }
            }
        }
    }
}

/// Read a headed CSV file. The label column is removed and the remaining
/// columns, in file order, become features named after their headers.
///
/// Error positions are 1-based file lines and columns.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Ingestion {
            path: path.to_path_buf(),
            row: 1,
            column: 1,
            message: "need a label column and at least one feature column".into(),
        });
    }
    let label_col = label.resolve(&header, path)?;
    let width = header.len();
    let names: Vec<String> =
        header.iter().enumerate().filter(|(j, _)| *j != label_col).map(|(_, h)| h.trim().to_string()).collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut last_line = 1;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        last_line = line;
        let cell_error = |column: usize, message: String| Error::Ingestion {
            path: path.to_path_buf(),
            row: line,
            column: column + 1,
            message,
        };
        if record.len() != width {
            return Err(cell_error(record.len().min(width), format!("expected {width} fields, found {}", record.len())));
        }
        for (j, cell) in record.iter().enumerate() {
            if j == label_col {
                labels.push(cell.trim().to_string());
                continue;
            }
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| cell_error(j, format!("`{cell}` in column `{}` is not a number", &header[j])))?;
            if !v.is_finite() {
                return Err(cell_error(j, format!("non-finite value `{cell}` in column `{}`", &header[j])));
            }
            values.push(v);
        }
    }
    let rows = labels.len();
    let mut distinct = labels.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Ingestion {
            path: path.to_path_buf(),
            row: last_line,
            column: label_col + 1,
            message: format!("label column `{}` needs at least two classes, found {}", &header[label_col], distinct.len()),
        });
    }
    let x = Array2::from_shape_vec((rows, width - 1), values).expect("row widths were checked");
    let name = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    Dataset::from_string_labels(name, x, &labels)?.with_feature_names(names)
}
