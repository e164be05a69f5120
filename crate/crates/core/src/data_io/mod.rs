//! Dataset ingestion, label canonicalization, normalization and splitting.

pub mod catalog;
mod csv_format;
mod libsvm;
pub mod normalize;
pub mod synthetic;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub use catalog::{Catalog, DatasetSource, DatasetSpec, LoadedSplit};
pub use csv_format::CsvReader;
pub use libsvm::LibsvmReader;
pub use normalize::{apply_normalizer, fit_normalizer, NormalizationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Comma,
    Char(char),
    /// Any run of spaces or tabs.
    Whitespace,
}

impl Delimiter {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "," | "comma" => Ok(Delimiter::Comma),
            "whitespace" | "ws" | " " => Ok(Delimiter::Whitespace),
            "\\t" | "\t" | "tab" => Ok(Delimiter::Char('\t')),
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::invalid(format!("unsupported delimiter `{other}`"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Skip the first line (CSV).
    pub header: bool,
    /// Zero-based label column (CSV); defaults to the last column.
    pub label_col: Option<usize>,
    pub delimiter: Delimiter,
    /// Minimum feature count (LIBSVM); rows are zero-padded up to it.
    pub num_features: Option<usize>,
}

/// Parsed rows before label canonicalization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawTable {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl RawTable {
    fn width(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A text dataset format, registered by name.
pub trait DatasetReader: Named + Send + Sync {
    fn parse(&self, text: &str, source: &Path, opts: &ReadOptions) -> Result<RawTable>;

    /// Writes `data` with its original label values when known.
    fn write(&self, data: &Dataset, out: &mut dyn Write) -> std::io::Result<()>;

    fn read(&self, path: &Path, opts: &ReadOptions) -> Result<RawTable> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.parse(&text, path, opts)
    }
}

pub fn formats() -> &'static Registry<dyn DatasetReader> {
    static REGISTRY: OnceLock<Registry<dyn DatasetReader>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn DatasetReader> = Registry::new("dataset format");
        reg.register(Arc::new(CsvReader)).register(Arc::new(LibsvmReader));
        reg
    })
}

pub fn format_by_name(name: &str) -> Result<Arc<dyn DatasetReader>> {
    formats().get(name)
}

/// Turns raw tables into datasets that share one label mapping and feature width.
///
/// Labels are mapped to `0..K` by ascending original value across all tables.
pub fn canonicalize(tables: Vec<RawTable>) -> Result<Vec<Dataset>> {
    let mut values: Vec<f64> = tables.iter().flat_map(|t| t.labels.iter().copied()).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let width = tables.iter().map(RawTable::width).max().unwrap_or(0);
    let classes: Vec<usize> = (0..values.len()).collect();

    tables
        .into_iter()
        .map(|t| {
            let labels = t
                .labels
                .iter()
                .map(|v| values.binary_search_by(|probe| probe.total_cmp(v)).expect("label collected above"))
                .collect();
            let rows = &t.rows;
            let features = DMatrix::from_fn(rows.len(), width, |i, j| rows[i].get(j).copied().unwrap_or(0.0));
            Ok(Dataset::new(features, labels, classes.clone())?.with_label_values(values.clone()))
        })
        .collect()
}

/// Loads one file with labels canonicalized to `0..K`.
pub fn load_dataset(path: &Path, format: &str, opts: &ReadOptions) -> Result<Dataset> {
    let reader = format_by_name(format)?;
    let table = reader.read(path, opts)?;
    canonicalize(vec![table]).map(|mut v| v.remove(0))
}

/// Loads a train/test pair under a shared label mapping.
pub fn load_pair(train: &Path, test: &Path, format: &str, opts: &ReadOptions) -> Result<(Dataset, Dataset)> {
    let reader = format_by_name(format)?;
    let tables = vec![reader.read(train, opts)?, reader.read(test, opts)?];
    let mut sets = canonicalize(tables)?;
    let test = sets.pop().expect("two tables");
    let train = sets.pop().expect("two tables");
    Ok((train, test))
}

pub fn write_dataset(data: &Dataset, format: &str, out: &mut dyn Write) -> Result<()> {
    let reader = format_by_name(format)?;
    reader
        .write(data, out)
        .map_err(|e| Error::io(format!("<{format} writer>"), e))
}

/// Seeded shuffle, then the first `train_n` rows train and the next `test_n` rows test.
pub fn split_counts(data: &Dataset, train_n: usize, test_n: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if train_n == 0 || test_n == 0 || train_n + test_n > data.n() {
        return Err(Error::invalid(format!(
            "cannot split {} rows into {train_n} train + {test_n} test",
            data.n()
        )));
    }
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train = data.select(&order[..train_n])?;
    let test = data.select(&order[train_n..train_n + test_n])?;
    Ok((train, test))
}

/// Seeded split holding out `test_fraction` of the rows (at least one each side).
pub fn split_fraction(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    let test_n = ((data.n() as f64 * test_fraction).round() as usize).clamp(1, data.n().saturating_sub(1));
    split_counts(data, data.n() - test_n, test_n, seed)
}

pub(crate) fn parse_number(field: &str, source: &Path, line: usize) -> Result<f64> {
    let field = field.trim();
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        path: source.to_path_buf(),
        line,
        message: if field.is_empty() || field == "?" {
            "missing value".to_string()
        } else {
            format!("`{field}` is not a number")
        },
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            path: source.to_path_buf(),
            line,
            message: format!("non-finite value `{field}`"),
        });
    }
    Ok(value)
}

/// Original label value for canonical label `label`.
pub(crate) fn label_value(data: &Dataset, label: usize) -> f64 {
    data.label_values().map_or(label as f64, |v| v[label])
}
