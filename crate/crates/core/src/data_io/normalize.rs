use nalgebra::DMatrix;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Per-feature min/max measured on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    /// True when applying these params cannot change any value.
    pub fn is_identity(&self) -> bool {
        self.min.iter().all(|&m| m == 0.0) && self.max.iter().all(|&m| m == 1.0)
    }
}

pub fn fit_normalizer(train: &Dataset) -> NormalizationParams {
    let x = train.features();
    let (min, max) = x
        .column_iter()
        .map(|col| (col.min(), col.max()))
        .unzip();
    NormalizationParams { min, max }
}

/// `(x - min) / (max - min)` per feature; constant features map to 0. No clipping.
pub fn apply_normalizer(params: &NormalizationParams, data: &Dataset) -> Result<Dataset> {
    if params.min.len() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: params.min.len(),
            actual: data.p(),
        });
    }
    let x = data.features();
    let scaled = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        let (lo, hi) = (params.min[j], params.max[j]);
        if hi > lo {
            (x[(i, j)] - lo) / (hi - lo)
        } else {
            0.0
        }
    });
    Ok(data.replace_features(scaled))
}
