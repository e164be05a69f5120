//! Extreme learning machine weak learner.
//!
//! A single hidden layer with random, frozen input weights and biases. Only
//! the output weights are learned, as the (weighted) least-squares solution
//! of `H β = T` where `T` is a ±1 one-hot target matrix.

pub mod activation;
pub mod linalg;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

pub use activation::Activation;
pub use linalg::{pseudo_inverse, solve_least_squares, DEFAULT_RCOND};

/// Random hidden layer: `L` nodes over `p` input features.
#[derive(Debug, Clone)]
pub struct HiddenLayer {
    /// `L × p`, row `j` is the input weight vector of node `j`.
    input_weights: DMatrix<f64>,
    biases: DVector<f64>,
    activation: Arc<dyn Activation>,
}

impl PartialEq for HiddenLayer {
    fn eq(&self, other: &Self) -> bool {
        self.input_weights == other.input_weights
            && self.biases == other.biases
            && self.activation.name() == other.activation.name()
    }
}

impl HiddenLayer {
    pub fn from_parts(
        input_weights: DMatrix<f64>,
        biases: DVector<f64>,
        activation: Arc<dyn Activation>,
    ) -> Result<Self> {
        if input_weights.nrows() == 0 || input_weights.ncols() == 0 {
            return Err(Error::invalid("hidden layer needs at least one node and one input"));
        }
        if biases.len() != input_weights.nrows() {
            return Err(Error::DimensionMismatch {
                expected: input_weights.nrows(),
                actual: biases.len(),
            });
        }
        Ok(HiddenLayer {
            input_weights,
            biases,
            activation,
        })
    }

    pub fn nodes(&self) -> usize {
        self.input_weights.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input_weights.ncols()
    }

    pub fn input_weights(&self) -> &DMatrix<f64> {
        &self.input_weights
    }

    pub fn biases(&self) -> &DVector<f64> {
        &self.biases
    }

    pub fn activation(&self) -> &Arc<dyn Activation> {
        &self.activation
    }
}

/// Draws weights and biases i.i.d. uniform on `[-1, 1]` from a ChaCha8 stream seeded with `seed`.
pub fn init_hidden_layer(
    input_dim: usize,
    nodes: usize,
    activation: Arc<dyn Activation>,
    seed: u64,
) -> Result<HiddenLayer> {
    if input_dim == 0 || nodes == 0 {
        return Err(Error::invalid(format!(
            "hidden layer needs p >= 1 and L >= 1, got p={input_dim}, L={nodes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Row-major draw order so node j's weights are contiguous in the stream.
    let mut weights = DMatrix::zeros(nodes, input_dim);
    for j in 0..nodes {
        for k in 0..input_dim {
            weights[(j, k)] = rng.random_range(-1.0..=1.0);
        }
    }
    let biases = DVector::from_fn(nodes, |_, _| rng.random_range(-1.0..=1.0));
    HiddenLayer::from_parts(weights, biases, activation)
}

/// `H[i, j] = G(a_j · x_i + b_j)` for every sample `i` and node `j`.
pub fn hidden_matrix(layer: &HiddenLayer, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() != layer.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: layer.input_dim(),
            actual: x.ncols(),
        });
    }
    let mut h = x * layer.input_weights.transpose();
    for (mut col, &b) in h.column_iter_mut().zip(layer.biases.iter()) {
        col.add_scalar_mut(b);
    }
    layer.activation.apply_in_place(h.as_mut_slice());
    Ok(h)
}

/// Hyperparameters of a single ELM fit.
#[derive(Debug, Clone)]
pub struct ElmParams {
    pub hidden_nodes: usize,
    pub activation: Arc<dyn Activation>,
    pub rcond: f64,
}

impl ElmParams {
    pub fn new(hidden_nodes: usize, activation: Arc<dyn Activation>) -> Self {
        ElmParams {
            hidden_nodes,
            activation,
            rcond: DEFAULT_RCOND,
        }
    }
}

/// A trained ELM: hidden layer plus output weights `β` (`L × K`).
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    hidden: HiddenLayer,
    beta: DMatrix<f64>,
    classes: Vec<Label>,
}

impl ElmModel {
    pub fn hidden(&self) -> &HiddenLayer {
        &self.hidden
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.input_dim()
    }
}

/// ±1 one-hot targets: `T[i, c] = +1` when sample `i` has class `classes[c]`, else `-1`.
pub fn target_matrix(labels: &[Label], classes: &[Label]) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), classes.len(), |i, c| {
        if classes[c] == labels[i] {
            1.0
        } else {
            -1.0
        }
    })
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::invalid("sample weights must be finite and non-negative"));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::invalid("sample weights must not all be zero"));
    }
    Ok(())
}

/// Per-row multipliers `sqrt(w_i / mean(w))`, or `None` when the weights are uniform.
fn row_scales(weights: &[f64]) -> Option<Vec<f64>> {
    let first = weights[0];
    if weights.iter().all(|&w| w == first) {
        return None;
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    Some(weights.iter().map(|&w| (w / mean).sqrt()).collect())
}

/// Fits output weights by weighted least squares over the dataset's class list.
pub fn train_elm(data: &Dataset, sample_weights: &[f64], params: &ElmParams, seed: u64) -> Result<ElmModel> {
    check_weights(sample_weights, data.n())?;
    if data.present_classes().len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least two distinct labels, found {:?}",
            data.present_classes()
        )));
    }
    let hidden = init_hidden_layer(data.p(), params.hidden_nodes, params.activation.clone(), seed)?;
    let mut h = hidden_matrix(&hidden, data.features())?;
    let mut t = target_matrix(data.labels(), data.classes());
    if let Some(scales) = row_scales(sample_weights) {
        for (i, &s) in scales.iter().enumerate() {
            h.row_mut(i).scale_mut(s);
            t.row_mut(i).scale_mut(s);
        }
    }
    let beta = solve_least_squares(&h, &t, params.rcond)?;
    Ok(ElmModel {
        hidden,
        beta,
        classes: data.classes().to_vec(),
    })
}

/// Index of the largest entry in `row`, lowest index on ties.
pub(crate) fn argmax<'a>(row: impl IntoIterator<Item = &'a f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in row.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Maps each score row to the class with the highest score.
pub fn labels_from_scores(scores: &DMatrix<f64>, classes: &[Label]) -> Vec<Label> {
    scores.row_iter().map(|row| classes[argmax(row.iter())]).collect()
}

/// Returns predicted labels and the raw `m × K` score matrix `H(X) β`.
pub fn predict_elm(model: &ElmModel, x: &DMatrix<f64>) -> Result<(Vec<Label>, DMatrix<f64>)> {
    let h = hidden_matrix(&model.hidden, x)?;
    let scores = h * &model.beta;
    let labels = labels_from_scores(&scores, &model.classes);
    Ok((labels, scores))
}
