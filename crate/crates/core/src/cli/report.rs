//! Report serialization and tabular inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stats::{ComparisonRecord, FeatureMatrix};

/// A real value that serializes non-finite values as strings (`"inf"`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Value(pub f64);

impl Value {
    pub fn text(self) -> String {
        let v = self.0;
        if v.is_nan() {
            "nan".into()
        } else if v == f64::INFINITY {
            "inf".into()
        } else if v == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            format!("{v}")
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.text())
        }
    }
}

/// Parses a value written by [`Value`].
pub fn parse_value(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Tracks files written by a command so they can be removed if it fails.
#[derive(Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    fn io_err(path: &Path, e: impl ToString) -> Error {
        Error::Write {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn record(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    pub fn write_bytes(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        self.record(path.to_path_buf());
        fs::write(path, bytes).map_err(|e| Self::io_err(path, e))
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Self::io_err(path, e))?;
        text.push('\n');
        self.write_bytes(path, text.as_bytes())
    }

    /// Writes a CSV with the given header and rows of already-formatted cells.
    pub fn write_csv(&mut self, path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| Self::io_err(path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| Self::io_err(path, e))?;
        }
        let bytes = w.into_inner().map_err(|e| Self::io_err(path, e))?;
        self.write_bytes(path, &bytes)
    }

    /// Removes everything written so far.
    pub fn discard(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Votes CSV with header `item_a,item_b,wins_a,wins_b`.
pub fn read_votes(path: &Path) -> Result<Vec<ComparisonRecord>> {
    let mut r = csv_reader(path)?;
    let header = r
        .headers()
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["item_a", "item_b", "wins_a", "wins_b"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::InvalidInput(format!(
            "{}: header must be `{}`",
            path.display(),
            expected.join(",")
        )));
    }
    r.deserialize()
        .map(|rec| rec.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))))
        .collect()
}

/// First column: row id; remaining columns: numeric features named by the header.
pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let mut r = csv_reader(path)?;
    let header = r
        .headers()
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        .clone();
    if header.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "{}: need an id column and at least one feature",
            path.display()
        )));
    }
    let cols: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let id = rec.get(0).unwrap_or_default().to_owned();
        let vals = rec
            .iter()
            .skip(1)
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!(
                        "{}: row {} (`{id}`): `{c}` is not a number",
                        path.display(),
                        line + 2
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(id);
        values.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no data rows", path.display())));
    }
    FeatureMatrix::new(rows, cols, values)
}
