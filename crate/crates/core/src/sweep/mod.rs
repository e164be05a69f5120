//! Experiment harness: single runs, standard-ELM baselines and resumable
//! (M, T, nh) grid sweeps.

pub mod heatmap;
pub mod results;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::boosting::BoostParams;
use crate::data_io::{apply_normalizer, fit_normalizer, DatasetSpec};
use crate::dataset::Dataset;
use crate::elm::{activation, Activation, ElmParams, DEFAULT_RCOND};
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::partition::{ensemble_predict, train_ensemble, EngineConfig};
use crate::pool;

pub use heatmap::{emit_heatmap, reducer_by_name, Axis, HeatmapGrid, Reducer};
pub use results::{read_records, write_records, ResultsWriter, SweepRecord, HEADER};

/// Axis values observed in the published result tables.
pub const DEFAULT_M_VALUES: std::ops::RangeInclusive<usize> = 1..=21;
pub const DEFAULT_T_VALUES: std::ops::RangeInclusive<usize> = 1..=10;
pub const DEFAULT_NH_VALUES: &[usize] = &[21, 50, 100, 150, 250, 340, 500];
pub const DEFAULT_SEED_COUNT: usize = 5;

/// Settings shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub activation: Arc<dyn Activation>,
    pub rcond: f64,
    pub engine: EngineConfig,
    pub weighted_weak_learner: bool,
    pub weighted_error: bool,
    pub data_dir: PathBuf,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            activation: activation::sigmoid(),
            rcond: DEFAULT_RCOND,
            engine: EngineConfig::default(),
            weighted_weak_learner: true,
            weighted_error: true,
            data_dir: PathBuf::from("."),
        }
    }
}

impl RunOptions {
    fn boost_params(&self, rounds: usize, nh: usize) -> BoostParams {
        BoostParams {
            rounds,
            elm: ElmParams {
                hidden_nodes: nh,
                activation: self.activation.clone(),
                rcond: self.rcond,
            },
            weighted_weak_learner: self.weighted_weak_learner,
            weighted_error: self.weighted_error,
        }
    }
}

/// One point of the (M, T, nh, seed) grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub partitions: usize,
    pub rounds: usize,
    pub nh: usize,
    pub seed: u64,
}

impl Cell {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("M", self.partitions), ("T", self.rounds), ("nh", self.nh)] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Normalized train/test data ready for repeated runs.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
}

/// Loads the dataset and min-max scales both splits with training statistics.
pub fn prepare(spec: &DatasetSpec, data_dir: &Path) -> Result<PreparedData> {
    let split = spec.load(data_dir)?;
    let params = fit_normalizer(&split.train);
    Ok(PreparedData {
        name: spec.name.clone(),
        train: apply_normalizer(&params, &split.train)?,
        test: apply_normalizer(&params, &split.test)?,
    })
}

/// Trains on the prepared training split and scores the test split.
pub fn run_prepared(data: &PreparedData, cell: Cell, opts: &RunOptions) -> Result<SweepRecord> {
    cell.validate()?;
    let params = opts.boost_params(cell.rounds, cell.nh);
    let started = Instant::now();
    let ensemble = train_ensemble(&data.train, cell.partitions, &params, cell.seed, &opts.engine)?;
    let train_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let (pred, _) = ensemble_predict(&ensemble, data.test.features())?;
    let predict_ms = started.elapsed().as_secs_f64() * 1e3;

    let report = evaluate(data.test.labels(), &pred, data.test.num_classes())?;
    Ok(SweepRecord {
        dataset: data.name.clone(),
        partitions: cell.partitions,
        rounds: cell.rounds,
        nh: cell.nh,
        seed: cell.seed,
        accuracy: report.accuracy,
        precision: report.macro_precision,
        recall: report.macro_recall,
        f1: report.f1,
        train_ms,
        predict_ms,
        status: results::STATUS_OK.to_string(),
    })
}

fn cell_context(e: Error, name: &str, cell: Cell) -> Error {
    e.with_context(format!(
        "{name} M={} T={} nh={} seed={}",
        cell.partitions, cell.rounds, cell.nh, cell.seed
    ))
}

/// Load, normalize, train, evaluate. Parameters are validated before any data is read.
pub fn run_single(spec: &DatasetSpec, cell: Cell, opts: &RunOptions) -> Result<SweepRecord> {
    cell.validate()?;
    let data = prepare(spec, &opts.data_dir)?;
    run_prepared(&data, cell, opts).map_err(|e| cell_context(e, &spec.name, cell))
}

#[derive(Debug, Clone)]
pub struct BaselineOutcome {
    pub best: SweepRecord,
    pub records: Vec<SweepRecord>,
}

/// Standard ELM (M = 1, T = 1) for every hidden-node count and seed; keeps
/// the highest-accuracy run.
pub fn run_baseline_elm(
    spec: &DatasetSpec,
    nh_values: &[usize],
    seeds: &[u64],
    workers: usize,
    opts: &RunOptions,
) -> Result<BaselineOutcome> {
    if nh_values.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("baseline needs at least one nh value and one seed"));
    }
    let cells: Vec<Cell> = nh_values
        .iter()
        .flat_map(|&nh| {
            seeds.iter().map(move |&seed| Cell {
                partitions: 1,
                rounds: 1,
                nh,
                seed,
            })
        })
        .collect();
    for c in &cells {
        c.validate()?;
    }
    let data = prepare(spec, &opts.data_dir)?;
    let mut inner = opts.clone();
    inner.engine.workers = 1;
    let records = pool::run_ordered(cells, workers, |cell| {
        run_prepared(&data, cell, &inner).map_err(|e| cell_context(e, &spec.name, cell))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = records
        .iter()
        .fold(None::<&SweepRecord>, |best, r| match best {
            Some(b) if b.accuracy >= r.accuracy => Some(b),
            _ => Some(r),
        })
        .expect("at least one record")
        .clone();
    Ok(BaselineOutcome { best, records })
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dataset: DatasetSpec,
    pub m_values: Vec<usize>,
    pub t_values: Vec<usize>,
    pub nh_values: Vec<usize>,
    pub seeds: Vec<u64>,
    pub output_path: PathBuf,
    /// Concurrent sweep cells.
    pub workers: usize,
    pub options: RunOptions,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, values) in [("M", &self.m_values), ("T", &self.t_values), ("nh", &self.nh_values)] {
            if values.is_empty() {
                return Err(Error::invalid(format!("{name} axis has no values")));
            }
            if values.contains(&0) {
                return Err(Error::invalid(format!("{name} values must be at least 1")));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("sweep needs at least one seed"));
        }
        Ok(())
    }

    /// Cartesian product in (M, T, nh, seed) order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &partitions in &self.m_values {
            for &rounds in &self.t_values {
                for &nh in &self.nh_values {
                    for &seed in &self.seeds {
                        cells.push(Cell {
                            partitions,
                            rounds,
                            nh,
                            seed,
                        });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Every record in the output file after the run, previous ones first.
    pub records: Vec<SweepRecord>,
    pub new_rows: usize,
    pub failed_rows: usize,
}

/// Runs every grid cell not already in the output file, appending one CSV row per cell.
///
/// A failing cell is written with an `error:` status and the sweep carries on.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let (mut writer, mut records) = ResultsWriter::open_resumable(&config.output_path)?;
    let done = results::present_keys(&records);
    let name = config.dataset.name.clone();
    let pending: Vec<Cell> = config
        .cells()
        .into_iter()
        .filter(|c| !done.contains(&(name.clone(), c.partitions, c.rounds, c.nh, c.seed)))
        .collect();
    log::info!(
        "sweep {}: {} cells, {} already done, {} to run",
        name,
        config.cells().len(),
        config.cells().len() - pending.len(),
        pending.len()
    );
    if pending.is_empty() {
        return Ok(SweepOutcome {
            records,
            new_rows: 0,
            failed_rows: 0,
        });
    }

    let data = prepare(&config.dataset, &config.options.data_dir)?;
    let mut new_rows = 0;
    let mut failed_rows = 0;
    let mut write_error = None;
    pool::run_streaming(
        pending,
        config.workers,
        |cell| {
            run_prepared(&data, cell, &config.options).unwrap_or_else(|e| {
                log::warn!("{name} M={} T={} nh={} seed={}: {e}", cell.partitions, cell.rounds, cell.nh, cell.seed);
                SweepRecord::failed(&name, cell.partitions, cell.rounds, cell.nh, cell.seed, &e)
            })
        },
        |_, record| {
            if write_error.is_some() {
                return;
            }
            if let Err(e) = writer.append(&record) {
                write_error = Some(e);
                return;
            }
            new_rows += 1;
            if !record.is_ok() {
                failed_rows += 1;
            }
            records.push(record);
        },
    );
    if let Some(e) = write_error {
        return Err(e);
    }
    Ok(SweepOutcome {
        records,
        new_rows,
        failed_rows,
    })
}

/// Mean and sample standard deviation of each metric over seeds, per (M, T, nh).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub partitions: usize,
    pub rounds: usize,
    pub nh: usize,
    pub runs: usize,
    pub accuracy: (f64, f64),
    pub precision: (f64, f64),
    pub recall: (f64, f64),
    pub f1: (f64, f64),
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(records: &[SweepRecord]) -> Vec<SummaryRow> {
    let mut groups: std::collections::BTreeMap<(usize, usize, usize), Vec<&SweepRecord>> = Default::default();
    for r in records.iter().filter(|r| r.is_ok()) {
        groups.entry((r.partitions, r.rounds, r.nh)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((partitions, rounds, nh), rs)| {
            let col = |f: fn(&SweepRecord) -> f64| mean_std(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                partitions,
                rounds,
                nh,
                runs: rs.len(),
                accuracy: col(|r| r.accuracy),
                precision: col(|r| r.precision),
                recall: col(|r| r.recall),
                f1: col(|r| r.f1),
            }
        })
        .collect()
}

/// `count` consecutive seeds starting at `base`.
pub fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}
