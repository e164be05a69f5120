//! Multi-class discrete AdaBoost (SAMME) over ELM weak learners.

use nalgebra::DMatrix;

use crate::dataset::{Dataset, Label};
use crate::elm::{labels_from_scores, predict_elm, train_elm, ElmModel, ElmParams};
use crate::error::{Error, Result};

/// Floor applied to a zero training error before computing `α`.
pub const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct BoostParams {
    pub rounds: usize,
    pub elm: ElmParams,
    /// Train each weak learner on the current distribution `D_t` (weighted least squares).
    /// When false every round sees uniform weights.
    pub weighted_weak_learner: bool,
    /// Measure `ε_t` under `D_t`. When false it is the plain misclassification rate.
    pub weighted_error: bool,
}

impl BoostParams {
    pub fn new(rounds: usize, elm: ElmParams) -> Self {
        BoostParams {
            rounds,
            elm,
            weighted_weak_learner: true,
            weighted_error: true,
        }
    }
}

/// Sample distribution over the training rows; sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution(Vec<f64>);

impl WeightDistribution {
    pub fn uniform(n: usize) -> Self {
        WeightDistribution(vec![1.0 / n as f64; n])
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("distribution weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("distribution weights must not all be zero"));
        }
        Ok(WeightDistribution(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Multiplies misclassified weights by `e^α` and renormalizes (the division is `Z_t`).
pub fn update_weights(d: &WeightDistribution, alpha: f64, misclassified: &[bool]) -> Result<WeightDistribution> {
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    if misclassified.len() != d.0.len() {
        return Err(Error::DimensionMismatch {
            expected: d.0.len(),
            actual: misclassified.len(),
        });
    }
    let boost = alpha.exp();
    let raw: Vec<f64> = d
        .0
        .iter()
        .zip(misclassified)
        .map(|(&w, &miss)| if miss { w * boost } else { w })
        .collect();
    let z: f64 = raw.iter().sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::NumericFailure(format!("weight normalizer Z_t = {z}")));
    }
    Ok(WeightDistribution(raw.into_iter().map(|w| w / z).collect()))
}

/// `½ ln((1-ε)/ε) + ½ ln(K-1)`, with `ε` floored at [`MIN_ERROR`].
pub fn round_alpha(error: f64, num_classes: usize) -> f64 {
    let eps = error.max(MIN_ERROR);
    0.5 * ((1.0 - eps) / eps).ln() + 0.5 * ((num_classes as f64) - 1.0).ln()
}

/// Seed for the weak learner of round `t` (1-based).
pub fn round_seed(seed: u64, round: usize) -> u64 {
    seed ^ round as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostRound {
    pub alpha: f64,
    pub model: ElmModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    rounds: Vec<BoostRound>,
    classes: Vec<Label>,
    rounds_requested: usize,
}

impl BoostedModel {
    pub fn rounds(&self) -> &[BoostRound] {
        &self.rounds
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn rounds_requested(&self) -> usize {
        self.rounds_requested
    }

    pub fn rounds_effective(&self) -> usize {
        self.rounds.len()
    }

    pub fn alpha_sum(&self) -> f64 {
        self.rounds.iter().map(|r| r.alpha).sum()
    }

    pub fn input_dim(&self) -> usize {
        self.rounds[0].model.input_dim()
    }
}

/// Per-round diagnostics from a boosting run.
#[derive(Debug, Clone, Default)]
pub struct BoostTrace {
    /// `ε_t` of every trained round, including a discarded final one.
    pub errors: Vec<f64>,
    /// `D_1, D_2, …`; one entry per retained round plus the initial distribution.
    pub distributions: Vec<WeightDistribution>,
}

pub fn train_adaboost(data: &Dataset, params: &BoostParams, seed: u64) -> Result<BoostedModel> {
    train_adaboost_traced(data, params, seed).map(|(model, _)| model)
}

pub fn train_adaboost_traced(data: &Dataset, params: &BoostParams, seed: u64) -> Result<(BoostedModel, BoostTrace)> {
    if params.rounds == 0 {
        return Err(Error::invalid("boosting needs at least one round"));
    }
    let n = data.n();
    let k = data.num_classes();
    let uniform = vec![1.0; n];
    let chance_error = 1.0 - 1.0 / k as f64;

    let mut dist = WeightDistribution::uniform(n);
    let mut trace = BoostTrace {
        errors: Vec::with_capacity(params.rounds),
        distributions: vec![dist.clone()],
    };
    let mut rounds = Vec::with_capacity(params.rounds);

    for t in 1..=params.rounds {
        let weights = if params.weighted_weak_learner { dist.weights() } else { &uniform[..] };
        let model = train_elm(data, weights, &params.elm, round_seed(seed, t))?;
        let (pred, _) = predict_elm(&model, data.features())?;
        let missed: Vec<bool> = pred.iter().zip(data.labels()).map(|(p, y)| p != y).collect();

        let error = if params.weighted_error {
            missed.iter().zip(dist.weights()).filter(|(m, _)| **m).map(|(_, w)| w).sum()
        } else {
            missed.iter().filter(|m| **m).count() as f64 / n as f64
        };
        trace.errors.push(error);

        if error >= chance_error {
            log::debug!("round {t}: error {error:.4} at or above chance {chance_error:.4}, stopping");
            break;
        }
        let alpha = round_alpha(error, k);
        rounds.push(BoostRound { alpha, model });
        if error <= 0.0 {
            log::debug!("round {t}: perfect weak learner, stopping");
            break;
        }
        // SAMME reweighting: misclassified rows gain e^{2α}, which at K = 2 is the
        // same normalized update as the symmetric e^{±α} rule.
        dist = update_weights(&dist, 2.0 * alpha, &missed)?;
        trace.distributions.push(dist.clone());
    }

    if rounds.is_empty() {
        return Err(Error::DegenerateData(format!(
            "first weak learner error {:.4} is no better than chance",
            trace.errors[0]
        )));
    }
    Ok((
        BoostedModel {
            rounds,
            classes: data.classes().to_vec(),
            rounds_requested: params.rounds,
        },
        trace,
    ))
}

/// `score[i, c] = Σ_t α_t · [round t predicts class c for row i]`.
pub fn boosted_scores(model: &BoostedModel, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut scores = DMatrix::zeros(x.nrows(), model.classes.len());
    for round in &model.rounds {
        let (pred, _) = predict_elm(&round.model, x)?;
        for (i, label) in pred.iter().enumerate() {
            let c = model
                .classes
                .binary_search(label)
                .expect("round predicts from the shared class list");
            scores[(i, c)] += round.alpha;
        }
    }
    Ok(scores)
}

pub fn boosted_predict(model: &BoostedModel, x: &DMatrix<f64>) -> Result<(Vec<Label>, DMatrix<f64>)> {
    let scores = boosted_scores(model, x)?;
    Ok((labels_from_scores(&scores, &model.classes), scores))
}
