//! Dense CSV and svmlight readers.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// On-disk dataset formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    /// Comma separated, one sample per row, label in the last column, no header.
    DenseCsv,
    /// `label idx:val idx:val ...` with 1-based feature indices.
    SparseSvmlight,
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        DataFormat::DenseCsv => read_dense_csv(file),
        DataFormat::SparseSvmlight => read_svmlight(BufReader::new(file)),
    }
}

/// Writes features then the label, one sample per row, in the layout
/// [`DataFormat::DenseCsv`] reads back.
pub fn save_dense_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_dense_csv(ds, file)
}

pub fn write_dense_csv<W: std::io::Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (row, &label) in ds.features.outer_iter().zip(&ds.labels) {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        fields.push(ds.class_names[label].clone());
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub(crate) fn read_dense_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None if record.len() < 2 => {
                return Err(Error::Parse {
                    line,
                    message: "need at least one feature and a label".into(),
                })
            }
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::ColumnCount {
                    line,
                    expected: w,
                    found: record.len(),
                })
            }
            Some(_) => {}
        }
        let last = record.len() - 1;
        for field in record.iter().take(last) {
            values.push(parse_value(field, line)?);
        }
        raw_labels.push(record[last].to_string());
    }
    let Some(width) = width else {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    };
    let features = Array2::from_shape_vec((raw_labels.len(), width - 1), values)
        .expect("row widths were checked");
    build(features, &raw_labels)
}

pub(crate) fn read_svmlight<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels = Vec::new();
    let mut dim = 0;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("content is nonempty");
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected idx:val, got {tok:?}"),
            })?;
            if idx == "qid" {
                continue;
            }
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature index {idx:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            row.push((idx - 1, parse_value(val, lineno)?));
            dim = dim.max(idx);
        }
        rows.push(row);
        raw_labels.push(label.to_string());
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    if dim == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no feature columns".into(),
        });
    }
    let mut features = Array2::zeros((rows.len(), dim));
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            features[[r, c]] = v;
        }
    }
    build(features, &raw_labels)
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(v)
}

fn build(features: Array2<f64>, raw_labels: &[String]) -> Result<Dataset> {
    let (labels, names) = remap_labels(raw_labels);
    if names.len() < 2 {
        return Err(Error::TooFewClasses(names.len()));
    }
    let c = names.len();
    Dataset::new(features, labels, c)?.with_class_names(names)
}

/// Maps raw labels onto `0..C` in sorted order. Labels are compared
/// numerically when all of them parse as numbers, lexically otherwise.
fn remap_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    match numeric {
        Some(values) => {
            let mut uniq = values.clone();
            uniq.sort_by(f64::total_cmp);
            uniq.dedup();
            let labels = values
                .iter()
                .map(|v| uniq.binary_search_by(|u| u.total_cmp(v)).expect("present"))
                .collect();
            let names = uniq
                .iter()
                .map(|u| {
                    let i = values.iter().position(|v| v == u).expect("present");
                    raw[i].clone()
                })
                .collect();
            (labels, names)
        }
        None => {
            let uniq: Vec<String> = raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let labels = raw
                .iter()
                .map(|s| uniq.binary_search(s).expect("present"))
                .collect();
            (labels, uniq)
        }
    }
}
