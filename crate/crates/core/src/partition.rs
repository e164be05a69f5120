//! In-process map/shuffle/reduce trainer.
//!
//! Map tags every training row with a uniform random partition id in
//! `[0, M)`. Shuffle groups rows by id. Each reduce task boosts an ELM
//! ensemble on one partition, and the per-partition models are fused into a
//! single voting classifier.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boosting::{boosted_scores, train_adaboost, BoostParams, BoostedModel};
use crate::dataset::{Dataset, Label};
use crate::elm::labels_from_scores;
use crate::error::{Error, Result};
use crate::pool;

pub const DEFAULT_MIN_PARTITION_ROWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub workers: usize,
    pub min_partition_rows: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: pool::default_workers(),
            min_partition_rows: DEFAULT_MIN_PARTITION_ROWS,
        }
    }
}

impl EngineConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// A training row tagged with its partition id.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedRow {
    pub key: usize,
    pub features: DVector<f64>,
    pub label: Label,
}

/// Assigns each row a partition id drawn uniformly from `0..partitions`.
pub fn map_assign(data: &Dataset, partitions: usize, seed: u64) -> Result<Vec<KeyedRow>> {
    if partitions == 0 {
        return Err(Error::invalid("partition count M must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..data.n())
        .map(|i| KeyedRow {
            key: rng.random_range(0..partitions),
            features: data.row(i),
            label: data.labels()[i],
        })
        .collect())
}

/// Groups rows by key, keeping their relative order. Empty keys are absent.
///
/// Each group's class list is the set of labels it contains.
pub fn shuffle_group(rows: Vec<KeyedRow>) -> BTreeMap<usize, Dataset> {
    let mut groups: BTreeMap<usize, Vec<KeyedRow>> = BTreeMap::new();
    for row in rows {
        groups.entry(row.key).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|(key, rows)| {
            let p = rows[0].features.len();
            let features = DMatrix::from_fn(rows.len(), p, |i, j| rows[i].features[j]);
            let labels = rows.iter().map(|r| r.label).collect();
            let ds = Dataset::from_labels(features, labels).expect("non-empty group with consistent width");
            (key, ds)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    TooFewRows { rows: usize, min: usize },
    SingleClass,
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReduceOutcome {
    Trained(BoostedModel),
    Skipped(SkipReason),
}

/// Boosts one partition against the global class list.
pub fn reduce_train(
    partition: &Dataset,
    params: &BoostParams,
    seed: u64,
    global_classes: &[Label],
    min_partition_rows: usize,
) -> Result<ReduceOutcome> {
    if partition.n() < min_partition_rows {
        return Ok(ReduceOutcome::Skipped(SkipReason::TooFewRows {
            rows: partition.n(),
            min: min_partition_rows,
        }));
    }
    if partition.present_classes().len() < 2 {
        return Ok(ReduceOutcome::Skipped(SkipReason::SingleClass));
    }
    let partition = partition.clone().with_classes(global_classes.to_vec())?;
    match train_adaboost(&partition, params, seed) {
        Ok(model) => Ok(ReduceOutcome::Trained(model)),
        Err(Error::DegenerateData(msg)) => Ok(ReduceOutcome::Skipped(SkipReason::Degenerate(msg))),
        Err(e) => Err(e),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Boosting seed for partition `pid`: a mix of `seed ^ pid`.
///
/// Mixing keeps the per-round seeds `partition_seed ^ t` of different
/// partitions from colliding.
pub fn partition_seed(seed: u64, pid: usize) -> u64 {
    splitmix64(seed ^ pid as u64)
}

/// Global classifier fused from per-partition boosted models.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedEnsemble {
    members: Vec<BoostedModel>,
    member_partitions: Vec<usize>,
    partitions_requested: usize,
    partition_sizes: Vec<usize>,
    classes: Vec<Label>,
}

impl PartitionedEnsemble {
    /// Builds an ensemble from already trained members.
    pub fn from_members(members: Vec<BoostedModel>, classes: Vec<Label>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::NoTrainablePartition(0));
        }
        if let Some(bad) = members.iter().find(|m| m.classes() != classes.as_slice()) {
            return Err(Error::invalid(format!(
                "member class list {:?} differs from {:?}",
                bad.classes(),
                classes
            )));
        }
        let dim = members[0].input_dim();
        if let Some(bad) = members.iter().find(|m| m.input_dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.input_dim(),
            });
        }
        let m = members.len();
        Ok(PartitionedEnsemble {
            members,
            member_partitions: (0..m).collect(),
            partitions_requested: m,
            partition_sizes: vec![0; m],
            classes,
        })
    }

    pub fn members(&self) -> &[BoostedModel] {
        &self.members
    }

    /// Partition id each member was trained on.
    pub fn member_partitions(&self) -> &[usize] {
        &self.member_partitions
    }

    pub fn partitions_requested(&self) -> usize {
        self.partitions_requested
    }

    /// Row count of every partition `0..M`, including empty ones.
    pub fn partition_sizes(&self) -> &[usize] {
        &self.partition_sizes
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }
}

/// map → shuffle → reduce (on the worker pool) → fuse.
pub fn train_ensemble(
    data: &Dataset,
    partitions: usize,
    params: &BoostParams,
    seed: u64,
    engine: &EngineConfig,
) -> Result<PartitionedEnsemble> {
    if params.rounds == 0 {
        return Err(Error::invalid("boosting needs at least one round"));
    }
    let keyed = map_assign(data, partitions, seed)?;
    let mut partition_sizes = vec![0usize; partitions];
    for row in &keyed {
        partition_sizes[row.key] += 1;
    }
    let groups = shuffle_group(keyed);
    let classes = data.classes().to_vec();

    let tasks: Vec<(usize, Dataset)> = groups.into_iter().collect();
    let outcomes = pool::run_ordered(tasks, engine.workers, |(pid, part)| {
        let outcome = reduce_train(&part, params, partition_seed(seed, pid), &classes, engine.min_partition_rows);
        (pid, outcome)
    });

    let mut members = Vec::new();
    let mut member_partitions = Vec::new();
    for (pid, outcome) in outcomes {
        match outcome.map_err(|e| e.with_context(format!("partition {pid}")))? {
            ReduceOutcome::Trained(model) => {
                members.push(model);
                member_partitions.push(pid);
            }
            ReduceOutcome::Skipped(reason) => {
                log::warn!("partition {pid} ({} rows) skipped: {reason:?}", partition_sizes[pid]);
            }
        }
    }
    if members.is_empty() {
        return Err(Error::NoTrainablePartition(partitions));
    }
    Ok(PartitionedEnsemble {
        members,
        member_partitions,
        partitions_requested: partitions,
        partition_sizes,
        classes,
    })
}

/// Sum of member vote scores, each member normalized by its own `Σ α_t`.
pub fn ensemble_scores(ens: &PartitionedEnsemble, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut total = DMatrix::zeros(x.nrows(), ens.classes.len());
    for member in &ens.members {
        let scores = boosted_scores(member, x)?;
        total += scores / member.alpha_sum();
    }
    Ok(total)
}

pub fn ensemble_predict(ens: &PartitionedEnsemble, x: &DMatrix<f64>) -> Result<(Vec<Label>, DMatrix<f64>)> {
    let scores = ensemble_scores(ens, x)?;
    Ok((labels_from_scores(&scores, &ens.classes), scores))
}
