//! Declarative dataset catalog (TOML).
//!
//! ```toml
//! [[dataset]]
//! name = "skin"
//! format = "csv"
//! path = "Skin_NonSkin.txt"   # single file, split by seeded shuffle
//! delimiter = "\t"
//! train_rows = 220543
//! test_rows = 24507
//! classes = 2
//! features = 4
//! ```
//!
//! A dataset comes from a `train`/`test` file pair, a single `path` that is
//! split deterministically, or a `synthetic` generator. Relative paths are
//! resolved against the data directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{load_dataset, load_pair, split_counts, split_fraction, synthetic, Delimiter, ReadOptions};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub const BUILTIN_CATALOG: &str = include_str!("../../datasets.toml");

pub const DEFAULT_SPLIT_SEED: u64 = 2015;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Files { train: PathBuf, test: PathBuf },
    Single { path: PathBuf, split_seed: u64 },
    Synthetic { generator: String, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub source: DatasetSource,
    pub format: String,
    pub read: ReadOptions,
    pub expected_train_n: Option<usize>,
    pub expected_test_n: Option<usize>,
    pub expected_classes: Option<usize>,
    pub expected_features: Option<usize>,
    /// Held-out share for single-file sources without expected counts.
    pub test_fraction: f64,
    pub url: Option<String>,
}

impl DatasetSpec {
    /// Ad-hoc spec for a file given on the command line.
    pub fn from_path(path: impl Into<PathBuf>, format: &str) -> Self {
        let path = path.into();
        DatasetSpec {
            name: path
                .file_stem()
                .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned()),
            source: DatasetSource::Single {
                path,
                split_seed: DEFAULT_SPLIT_SEED,
            },
            format: format.to_string(),
            read: ReadOptions::default(),
            expected_train_n: None,
            expected_test_n: None,
            expected_classes: None,
            expected_features: None,
            test_fraction: DEFAULT_TEST_FRACTION,
            url: None,
        }
    }

    pub fn synthetic(name: &str, generator: &str, train_n: usize, test_n: usize, seed: u64) -> Self {
        DatasetSpec {
            name: name.to_string(),
            source: DatasetSource::Synthetic {
                generator: generator.to_string(),
                seed,
            },
            format: "csv".to_string(),
            read: ReadOptions::default(),
            expected_train_n: Some(train_n),
            expected_test_n: Some(test_n),
            expected_classes: None,
            expected_features: None,
            test_fraction: DEFAULT_TEST_FRACTION,
            url: None,
        }
    }

    /// Paths this spec reads, after resolution against `data_dir`.
    pub fn files(&self, data_dir: &Path) -> Vec<PathBuf> {
        match &self.source {
            DatasetSource::Files { train, test } => vec![data_dir.join(train), data_dir.join(test)],
            DatasetSource::Single { path, .. } => vec![data_dir.join(path)],
            DatasetSource::Synthetic { .. } => Vec::new(),
        }
    }

    pub fn is_available(&self, data_dir: &Path) -> bool {
        self.files(data_dir).iter().all(|p| p.is_file())
    }

    /// Loads train and test sets and compares their shapes with the expected ones.
    pub fn load(&self, data_dir: &Path) -> Result<LoadedSplit> {
        let (train, test) = self.load_sets(data_dir).map_err(|e| e.with_context(format!("dataset `{}`", self.name)))?;
        let mut deviations = Vec::new();
        let mut check = |what: &str, expected: Option<usize>, actual: usize| {
            if let Some(e) = expected {
                if e != actual {
                    deviations.push(format!("{what}: expected {e}, found {actual}"));
                }
            }
        };
        check("train rows", self.expected_train_n, train.n());
        check("test rows", self.expected_test_n, test.n());
        check("classes", self.expected_classes, train.num_classes());
        check("features", self.expected_features, train.p());
        for d in &deviations {
            log::warn!("dataset `{}` {d}", self.name);
        }
        Ok(LoadedSplit {
            train,
            test,
            deviations,
        })
    }

    fn load_sets(&self, data_dir: &Path) -> Result<(Dataset, Dataset)> {
        match &self.source {
            DatasetSource::Files { train, test } => {
                load_pair(&data_dir.join(train), &data_dir.join(test), &self.format, &self.read)
            }
            DatasetSource::Single { path, split_seed } => {
                let all = load_dataset(&data_dir.join(path), &self.format, &self.read)?;
                self.split(&all, *split_seed)
            }
            DatasetSource::Synthetic { generator, seed } => {
                let n = self.expected_train_n.unwrap_or(200) + self.expected_test_n.unwrap_or(50);
                let all = synthetic::generate(generator, n, *seed)
                    .ok_or_else(|| Error::invalid(format!("unknown synthetic generator `{generator}`")))?;
                self.split(&all, *seed)
            }
        }
    }

    fn split(&self, all: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
        match (self.expected_train_n, self.expected_test_n) {
            (Some(tr), Some(te)) if tr + te <= all.n() => split_counts(all, tr, te, seed),
            _ => split_fraction(all, self.test_fraction, seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedSplit {
    pub train: Dataset,
    pub test: Dataset,
    /// Human-readable mismatches against the expected shape.
    pub deviations: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    dataset: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: String,
    #[serde(default = "default_format")]
    format: String,
    train: Option<PathBuf>,
    test: Option<PathBuf>,
    path: Option<PathBuf>,
    synthetic: Option<String>,
    seed: Option<u64>,
    #[serde(default)]
    header: bool,
    label_col: Option<usize>,
    delimiter: Option<String>,
    num_features: Option<usize>,
    train_rows: Option<usize>,
    test_rows: Option<usize>,
    classes: Option<usize>,
    features: Option<usize>,
    test_fraction: Option<f64>,
    url: Option<String>,
}

fn default_format() -> String {
    "csv".into()
}

impl Entry {
    fn into_spec(self) -> Result<DatasetSpec> {
        let seed = self.seed.unwrap_or(DEFAULT_SPLIT_SEED);
        let source = match (self.train, self.test, self.path, self.synthetic) {
            (Some(train), Some(test), None, None) => DatasetSource::Files { train, test },
            (None, None, Some(path), None) => DatasetSource::Single { path, split_seed: seed },
            (None, None, None, Some(generator)) => DatasetSource::Synthetic { generator, seed },
            _ => {
                return Err(Error::invalid(format!(
                    "dataset `{}` needs exactly one of train+test, path or synthetic",
                    self.name
                )))
            }
        };
        for (what, v) in [
            ("train_rows", self.train_rows),
            ("test_rows", self.test_rows),
            ("classes", self.classes),
            ("features", self.features),
        ] {
            if v == Some(0) {
                return Err(Error::invalid(format!("dataset `{}`: {what} must be positive", self.name)));
            }
        }
        let delimiter = self.delimiter.as_deref().map(Delimiter::parse).transpose()?.unwrap_or_default();
        Ok(DatasetSpec {
            name: self.name,
            source,
            format: self.format,
            read: ReadOptions {
                header: self.header,
                label_col: self.label_col,
                delimiter,
                num_features: self.num_features,
            },
            expected_train_n: self.train_rows,
            expected_test_n: self.test_rows,
            expected_classes: self.classes,
            expected_features: self.features,
            test_fraction: self.test_fraction.unwrap_or(DEFAULT_TEST_FRACTION),
            url: self.url,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    specs: Vec<DatasetSpec>,
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<catalog>"),
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        let specs = file.dataset.into_iter().map(Entry::into_spec).collect::<Result<Vec<_>>>()?;
        Ok(Catalog { specs })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| e.with_context(format!("catalog {}", path.display())))
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CATALOG).expect("bundled catalog is valid")
    }

    pub fn get(&self, name: &str) -> Option<&DatasetSpec> {
        self.specs.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn specs(&self) -> &[DatasetSpec] {
        &self.specs
    }
}
