use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub dataset: String,
    pub trial: usize,
    pub budget: usize,
    /// Annotator count, empty for methods without pseudo annotators.
    pub m: Option<usize>,
    /// Empty when the cell failed.
    pub accuracy: Option<f64>,
    pub elapsed_ms: u64,
    pub seed: u64,
}

/// Mean and spread per (method, dataset, budget, m). Rows with
/// `dataset == "overall"` average the per-dataset means with equal weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub dataset: String,
    pub budget: usize,
    pub m: Option<usize>,
    /// Trials (or datasets, for overall rows) averaged.
    pub n: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation, empty when `n < 2` or for overall rows.
    pub std_accuracy: Option<f64>,
}

pub const OVERALL: &str = "overall";

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_rows_to<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_rows(rows, std::io::BufWriter::new(file))
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_results_from(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_results(file)
}

pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, std)
}

/// Groups by (method, dataset, budget, m) and appends unweighted
/// across-dataset means. Failed cells are skipped.
pub fn aggregate(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, usize, Option<usize>), Vec<f64>> = BTreeMap::new();
    for r in rows {
        if let Some(a) = r.accuracy {
            groups
                .entry((r.method.clone(), r.dataset.clone(), r.budget, r.m))
                .or_default()
                .push(a);
        }
    }
    let mut out = Vec::new();
    let mut overall: BTreeMap<(String, usize, Option<usize>), Vec<f64>> = BTreeMap::new();
    for ((method, dataset, budget, m), values) in groups {
        let (mean, std) = mean_std(&values);
        overall.entry((method.clone(), budget, m)).or_default().push(mean);
        out.push(SummaryRow {
            method,
            dataset,
            budget,
            m,
            n: values.len(),
            mean_accuracy: mean,
            std_accuracy: std,
        });
    }
    for ((method, budget, m), means) in overall {
        out.push(SummaryRow {
            method,
            dataset: OVERALL.into(),
            budget,
            m,
            n: means.len(),
            mean_accuracy: mean_std(&means).0,
            std_accuracy: None,
        });
    }
    out
}

/// Number of distinct clusters of origin hit by `selected`.
pub fn cluster_coverage(selected: &[usize], cluster_ids: Option<&[usize]>) -> Result<usize> {
    let ids = cluster_ids.ok_or_else(|| Error::InvalidDataset("dataset has no cluster ids".into()))?;
    let mut hit: Vec<usize> = selected
        .iter()
        .map(|&i| {
            ids.get(i).copied().ok_or(Error::DimensionMismatch {
                expected: ids.len(),
                found: i + 1,
            })
        })
        .collect::<Result<_>>()?;
    hit.sort_unstable();
    hit.dedup();
    Ok(hit.len())
}
