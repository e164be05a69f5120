//! Confusion matrix, accuracy and macro-averaged precision, recall and F1.

use crate::dataset::Label;
use crate::error::{Error, Result};

/// `counts[t][p]`: rows are true classes, columns are predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = counts.len();
        if k == 0 || counts.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("confusion matrix must be square and non-empty"));
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|i| self.counts[i][i]).sum()
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }
}

pub fn confusion(truth: &[Label], predicted: &[Label], num_classes: usize) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "label vectors differ in length: {} vs {}",
            truth.len(),
            predicted.len()
        )));
    }
    if num_classes == 0 {
        return Err(Error::invalid("class count must be positive"));
    }
    let mut counts = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= num_classes || p >= num_classes {
            return Err(Error::invalid(format!("label pair ({t}, {p}) outside 0..{num_classes}")));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub f1: f64,
    pub per_class_precision: Vec<f64>,
    pub per_class_recall: Vec<f64>,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision (column-wise) and recall (row-wise), averaged over all
/// `K` classes. A class with an empty column or row contributes 0 but still
/// counts in the divisor. F1 is the harmonic mean of the two macro averages.
pub fn macro_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::invalid("confusion matrix holds no samples"));
    }
    let k = cm.num_classes();
    let per_class_precision: Vec<f64> = (0..k).map(|i| ratio(cm.get(i, i), cm.col_sum(i))).collect();
    let per_class_recall: Vec<f64> = (0..k).map(|i| ratio(cm.get(i, i), cm.row_sum(i))).collect();
    let macro_precision = per_class_precision.iter().sum::<f64>() / k as f64;
    let macro_recall = per_class_recall.iter().sum::<f64>() / k as f64;
    let f1 = if macro_precision + macro_recall > 0.0 {
        2.0 * macro_precision * macro_recall / (macro_precision + macro_recall)
    } else {
        0.0
    };
    Ok(MetricsReport {
        accuracy: cm.trace() as f64 / total as f64,
        macro_precision,
        macro_recall,
        f1,
        per_class_precision,
        per_class_recall,
        confusion: cm.clone(),
    })
}

/// Confusion plus macro metrics in one step.
pub fn evaluate(truth: &[Label], predicted: &[Label], num_classes: usize) -> Result<MetricsReport> {
    macro_metrics(&confusion(truth, predicted, num_classes)?)
}
