use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Class label after canonicalization: an index into the dataset's class list.
pub type Label = usize;

/// Feature matrix plus integer class labels.
///
/// `classes` is the sorted, duplicate-free list of labels the dataset is
/// defined over. It may contain labels that no row carries (a random
/// partition of a larger dataset keeps the parent's class list).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: Vec<Label>,
    classes: Vec<Label>,
    /// Original label value for each canonical label, when loaded from a file.
    label_values: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, labels: Vec<Label>, classes: Vec<Label>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::invalid(format!(
                "dataset must have n >= 1 and p >= 1, got {}x{}",
                features.nrows(),
                features.ncols()
            )));
        }
        if labels.len() != features.nrows() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                actual: labels.len(),
            });
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("class list must be sorted and duplicate-free"));
        }
        if let Some(bad) = labels.iter().find(|l| classes.binary_search(l).is_err()) {
            return Err(Error::invalid(format!("label {bad} is not in the class list")));
        }
        Ok(Dataset {
            features,
            labels,
            classes,
            label_values: None,
        })
    }

    /// Builds a dataset whose class list is the set of labels present.
    pub fn from_labels(features: DMatrix<f64>, labels: Vec<Label>) -> Result<Self> {
        let classes = distinct(&labels);
        Self::new(features, labels, classes)
    }

    /// Builds a dataset from row vectors, which must all have the same length.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: bad.len(),
            });
        }
        let features = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::from_labels(features, labels)
    }

    pub fn with_label_values(mut self, values: Vec<f64>) -> Self {
        self.label_values = Some(values);
        self
    }

    /// Replaces the class list, e.g. with a superset shared by several datasets.
    pub fn with_classes(self, classes: Vec<Label>) -> Result<Self> {
        let label_values = self.label_values;
        let mut ds = Self::new(self.features, self.labels, classes)?;
        ds.label_values = label_values;
        Ok(ds)
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn label_values(&self) -> Option<&[f64]> {
        self.label_values.as_deref()
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Labels that at least one row carries.
    pub fn present_classes(&self) -> Vec<Label> {
        distinct(&self.labels)
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.features.row(i).transpose()
    }

    /// Rows at `indices`, in that order, keeping this dataset's class list.
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        let features = self.features.select_rows(indices.iter());
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let mut ds = Dataset::new(features, labels, self.classes.clone())?;
        ds.label_values = self.label_values.clone();
        Ok(ds)
    }

    pub(crate) fn replace_features(&self, features: DMatrix<f64>) -> Dataset {
        debug_assert_eq!(features.shape(), self.features.shape());
        Dataset {
            features,
            labels: self.labels.clone(),
            classes: self.classes.clone(),
            label_values: self.label_values.clone(),
        }
    }
}

pub(crate) fn distinct(labels: &[Label]) -> Vec<Label> {
    let mut v = labels.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}
