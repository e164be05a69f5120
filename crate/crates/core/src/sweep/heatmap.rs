//! Two-axis accuracy grids from a three-axis sweep.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use super::results::SweepRecord;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Partitions,
    Rounds,
    Hidden,
}

impl Axis {
    fn value(self, r: &SweepRecord) -> usize {
        match self {
            Axis::Partitions => r.partitions,
            Axis::Rounds => r.rounds,
            Axis::Hidden => r.nh,
        }
    }

    fn remaining(a: Axis, b: Axis) -> Axis {
        [Axis::Partitions, Axis::Rounds, Axis::Hidden]
            .into_iter()
            .find(|x| *x != a && *x != b)
            .expect("two distinct axes leave a third")
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Partitions => "M",
            Axis::Rounds => "T",
            Axis::Hidden => "nh",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" | "partitions" => Ok(Axis::Partitions),
            "T" | "t" | "rounds" => Ok(Axis::Rounds),
            "nh" | "NH" | "hidden" => Ok(Axis::Hidden),
            other => Err(Error::invalid(format!("unknown axis `{other}` (use M, T or nh)"))),
        }
    }
}

/// Collapses the accuracies along the marginalized axis into one cell value.
pub trait Reducer: Named + Send + Sync {
    fn reduce(&self, values: &[f64]) -> f64;
}

pub struct MaxReducer;

impl Named for MaxReducer {
    fn name(&self) -> &'static str {
        "max"
    }
}

impl Reducer for MaxReducer {
    fn reduce(&self, values: &[f64]) -> f64 {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub struct MeanReducer;

impl Named for MeanReducer {
    fn name(&self) -> &'static str {
        "mean"
    }
}

impl Reducer for MeanReducer {
    fn reduce(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn reducers() -> &'static Registry<dyn Reducer> {
    static REGISTRY: OnceLock<Registry<dyn Reducer>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Reducer> = Registry::new("reduce rule");
        reg.register(Arc::new(MaxReducer)).register(Arc::new(MeanReducer));
        reg
    })
}

pub fn reducer_by_name(name: &str) -> Result<Arc<dyn Reducer>> {
    reducers().get(name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub x_values: Vec<usize>,
    pub y_values: Vec<usize>,
    /// `cells[row][col]` for `y_values[row]`, `x_values[col]`; `None` where no run exists.
    pub cells: Vec<Vec<Option<f64>>>,
}

/// Builds an accuracy grid over `(x_axis, y_axis)`.
///
/// Successful runs are first averaged over seeds per `(M, T, nh)` cell, then
/// the third axis is collapsed with `reducer`. Failed runs are ignored.
pub fn emit_heatmap(records: &[SweepRecord], x_axis: Axis, y_axis: Axis, reducer: &dyn Reducer) -> Result<HeatmapGrid> {
    if x_axis == y_axis {
        return Err(Error::invalid(format!("heatmap axes must differ, got {x_axis} twice")));
    }
    let z_axis = Axis::remaining(x_axis, y_axis);

    let mut per_cell: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        per_cell
            .entry((x_axis.value(r), y_axis.value(r), z_axis.value(r)))
            .or_default()
            .push(r.accuracy);
    }
    if per_cell.is_empty() {
        return Err(Error::invalid("no successful records to plot"));
    }

    let mut per_xy: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for ((x, y, _), accs) in per_cell {
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        per_xy.entry((x, y)).or_default().push(mean);
    }

    let x_values: Vec<usize> = per_xy.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect();
    let y_values: Vec<usize> = per_xy.keys().map(|k| k.1).collect::<BTreeSet<_>>().into_iter().collect();
    let cells = y_values
        .iter()
        .map(|y| {
            x_values
                .iter()
                .map(|x| per_xy.get(&(*x, *y)).map(|v| reducer.reduce(v)))
                .collect()
        })
        .collect();
    Ok(HeatmapGrid {
        x_axis,
        y_axis,
        x_values,
        y_values,
        cells,
    })
}

impl HeatmapGrid {
    /// Dense CSV: x values as columns, y values as rows, empty for missing cells.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        write!(out, "{}\\{}", self.y_axis, self.x_axis)?;
        for x in &self.x_values {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
        for (y, row) in self.y_values.iter().zip(&self.cells) {
            write!(out, "{y}")?;
            for cell in row {
                match cell {
                    Some(v) => write!(out, ",{v}")?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// gnuplot `nonuniform matrix` layout; missing cells are `NaN`.
    pub fn write_gnuplot(&self, out: &mut dyn Write) -> std::io::Result<()> {
        write!(out, "{}", self.x_values.len())?;
        for x in &self.x_values {
            write!(out, " {x}")?;
        }
        writeln!(out)?;
        for (y, row) in self.y_values.iter().zip(&self.cells) {
            write!(out, "{y}")?;
            for cell in row {
                write!(out, " {}", cell.unwrap_or(f64::NAN))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
