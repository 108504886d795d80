//! Miss-rate sweeps over cache size, L2 size and list length.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::hierarchy::{
    percent, simulate_with, HierarchyConfig, Metric, MissRateReport, SimError, SimOptions,
};
use crate::policy::{PolicyError, PolicySpec};
use crate::trace::{generate_merge_sort_trace, Trace, TraceError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sweep axis is empty")]
    EmptyAxis,
    #[error("sweep axis must be strictly increasing positive integers")]
    AxisNotIncreasing,
    #[error("sweep needs at least one policy")]
    NoColumns,
    #[error("column `{column}` is not valid for a {family} sweep")]
    ColumnFamily { column: Column, family: SweepFamily },
    #[error("improvement is undefined for a zero baseline")]
    UndefinedImprovement,
    #[error("miss rates must be fractions in [0, 1] (got better={better}, baseline={baseline})")]
    RateOutOfRange { better: f64, baseline: f64 },
    #[error("invalid column `{0}`: {1}")]
    BadColumn(String, PolicyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{column} at {axis}: {source}")]
    Cell {
        column: Column,
        axis: usize,
        source: SimError,
    },
}

/// One compared configuration: a policy alone at L1, or an L1/L2 pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Single(PolicySpec),
    Pair(PolicySpec, PolicySpec),
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Single(p) => write!(f, "{p}"),
            Column::Pair(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

impl FromStr for Column {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |p: &str| {
            p.parse::<PolicySpec>()
                .map_err(|e| ExperimentError::BadColumn(s.to_string(), e))
        };
        match s.split_once('/') {
            Some((a, b)) => Ok(Column::Pair(parse(a)?, parse(b)?)),
            None => Ok(Column::Single(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepFamily {
    L1Sweep,
    PairSweep,
    ListSweep,
}

impl fmt::Display for SweepFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepFamily::L1Sweep => "l1-size",
            SweepFamily::PairSweep => "l2-size",
            SweepFamily::ListSweep => "list-length",
        })
    }
}

/// What is held fixed; the axis supplies the remaining dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Axis is the L1 capacity; single-level caches only.
    L1Sizes { list_len: usize },
    /// Axis is the L2 capacity; L1/L2 pairs only.
    L2Sizes { list_len: usize, l1_capacity: usize },
    /// Axis is the list length. Single columns run at L1 alone.
    ListLengths {
        l1_capacity: usize,
        l2_capacity: usize,
    },
}

impl SweepKind {
    pub fn family(&self) -> SweepFamily {
        match self {
            SweepKind::L1Sizes { .. } => SweepFamily::L1Sweep,
            SweepKind::L2Sizes { .. } => SweepFamily::PairSweep,
            SweepKind::ListLengths { .. } => SweepFamily::ListSweep,
        }
    }
}

pub const DEFAULT_LIST_LEN: usize = 256;
pub const DEFAULT_L1_SIZES: [usize; 6] = [8, 16, 32, 64, 128, 256];
pub const DEFAULT_PAIR_L1: usize = 8;
pub const DEFAULT_L2_SIZES: [usize; 7] = [16, 56, 96, 136, 176, 216, 256];
pub const DEFAULT_LIST_L1: usize = 32;
pub const DEFAULT_LIST_L2: usize = 128;
pub const DEFAULT_LIST_LENGTHS: [usize; 8] = [8, 16, 32, 64, 128, 256, 512, 1024];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub axis: Vec<usize>,
    pub columns: Vec<Column>,
    pub metric: Metric,
    pub options: SimOptions,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, axis: Vec<usize>, columns: Vec<Column>) -> Self {
        SweepSpec {
            kind,
            axis,
            columns,
            metric: Metric::NoComp,
            options: SimOptions::default(),
        }
    }

    /// LRU, FIFO, LFU and PBR at L1 sizes 8..256 on a 256-element sort.
    pub fn default_l1() -> Self {
        let columns = [
            PolicySpec::Lru,
            PolicySpec::Fifo,
            PolicySpec::Lfu,
            PolicySpec::pbr(),
        ]
        .into_iter()
        .map(Column::Single)
        .collect();
        SweepSpec::new(
            SweepKind::L1Sizes {
                list_len: DEFAULT_LIST_LEN,
            },
            DEFAULT_L1_SIZES.to_vec(),
            columns,
        )
    }

    /// L1 in {LRU, FIFO, PBR} paired with L2 in {LRU, FIFO, LFU}, L1 = 8,
    /// L2 from 16 to 256.
    pub fn default_pairs() -> Self {
        let l1 = [PolicySpec::Lru, PolicySpec::Fifo, PolicySpec::pbr()];
        let l2 = [PolicySpec::Lru, PolicySpec::Fifo, PolicySpec::Lfu];
        SweepSpec::new(
            SweepKind::L2Sizes {
                list_len: DEFAULT_LIST_LEN,
                l1_capacity: DEFAULT_PAIR_L1,
            },
            DEFAULT_L2_SIZES.to_vec(),
            pair_columns(&l1, &l2),
        )
    }

    /// L1 = 32, L2 = 128, list lengths 8..1024.
    pub fn default_list() -> Self {
        let mut columns: Vec<Column> = [
            PolicySpec::Lru,
            PolicySpec::Fifo,
            PolicySpec::Lfu,
            PolicySpec::pbr(),
        ]
        .into_iter()
        .map(Column::Single)
        .collect();
        columns.extend(default_list_pairs());
        SweepSpec::new(
            SweepKind::ListLengths {
                l1_capacity: DEFAULT_LIST_L1,
                l2_capacity: DEFAULT_LIST_L2,
            },
            DEFAULT_LIST_LENGTHS.to_vec(),
            columns,
        )
    }

    pub fn family(&self) -> SweepFamily {
        self.kind.family()
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.axis.is_empty() {
            return Err(ExperimentError::EmptyAxis);
        }
        if self.axis[0] == 0 || self.axis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::AxisNotIncreasing);
        }
        if self.columns.is_empty() {
            return Err(ExperimentError::NoColumns);
        }
        let family = self.family();
        for &column in &self.columns {
            let ok = matches!(
                (family, column),
                (SweepFamily::L1Sweep, Column::Single(_))
                    | (SweepFamily::PairSweep, Column::Pair(..))
                    | (SweepFamily::ListSweep, _)
            );
            if !ok {
                return Err(ExperimentError::ColumnFamily { column, family });
            }
        }
        Ok(())
    }

    fn list_len_at(&self, axis: usize) -> usize {
        match self.kind {
            SweepKind::L1Sizes { list_len } | SweepKind::L2Sizes { list_len, .. } => list_len,
            SweepKind::ListLengths { .. } => axis,
        }
    }

    /// Hierarchy simulated for one cell.
    pub fn config_for(&self, column: Column, axis: usize) -> HierarchyConfig {
        match (self.kind, column) {
            (SweepKind::L1Sizes { .. }, Column::Single(p)) => HierarchyConfig::single(axis, p),
            (SweepKind::L1Sizes { .. }, Column::Pair(a, b)) => {
                HierarchyConfig::two_level(axis, a, axis, b)
            }
            (SweepKind::L2Sizes { l1_capacity, .. }, Column::Pair(a, b)) => {
                HierarchyConfig::two_level(l1_capacity, a, axis, b)
            }
            (SweepKind::L2Sizes { l1_capacity, .. }, Column::Single(p)) => {
                HierarchyConfig::single(l1_capacity, p)
            }
            (SweepKind::ListLengths { l1_capacity, .. }, Column::Single(p)) => {
                HierarchyConfig::single(l1_capacity, p)
            }
            (
                SweepKind::ListLengths {
                    l1_capacity,
                    l2_capacity,
                },
                Column::Pair(a, b),
            ) => HierarchyConfig::two_level(l1_capacity, a, l2_capacity, b),
        }
    }
}

/// Every L1 policy paired with every L2 policy, L1-major.
pub fn pair_columns(l1: &[PolicySpec], l2: &[PolicySpec]) -> Vec<Column> {
    l1.iter()
        .flat_map(|&a| l2.iter().map(move |&b| Column::Pair(a, b)))
        .collect()
}

pub fn default_list_pairs() -> Vec<Column> {
    let mut pairs = pair_columns(
        &[PolicySpec::pbr()],
        &[PolicySpec::Lru, PolicySpec::Lfu, PolicySpec::Fifo],
    );
    pairs.push(Column::Pair(PolicySpec::Fifo, PolicySpec::Fifo));
    pairs
}

/// Results of a sweep; one report per (axis value, column).
#[derive(Debug, Clone)]
pub struct SweepTable {
    spec: SweepSpec,
    // cells[axis_index][column_index]
    cells: Vec<Vec<MissRateReport>>,
}

impl SweepTable {
    pub fn spec(&self) -> &SweepSpec {
        &self.spec
    }

    pub fn axis(&self) -> &[usize] {
        &self.spec.axis
    }

    pub fn columns(&self) -> &[Column] {
        &self.spec.columns
    }

    pub fn report(&self, axis_index: usize, column_index: usize) -> &MissRateReport {
        &self.cells[axis_index][column_index]
    }

    /// Global miss rate of a cell under the spec's metric, as a fraction.
    pub fn rate(&self, axis_index: usize, column_index: usize) -> f64 {
        self.cells[axis_index][column_index]
            .global
            .get(self.spec.metric)
    }

    pub fn column_index(&self, column: &Column) -> Option<usize> {
        self.spec.columns.iter().position(|c| c == column)
    }

    /// All rates of one column in axis order.
    pub fn column_rates(&self, column: &Column) -> Option<Vec<f64>> {
        let c = self.column_index(column)?;
        Some((0..self.spec.axis.len()).map(|a| self.rate(a, c)).collect())
    }
}

/// Runs every cell of `spec` from a cold start. Cells run in parallel; the
/// table is always in spec order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, ExperimentError> {
    spec.validate()?;

    let mut traces: BTreeMap<usize, Trace> = BTreeMap::new();
    for &axis in &spec.axis {
        let n = spec.list_len_at(axis);
        if let Entry::Vacant(slot) = traces.entry(n) {
            slot.insert(generate_merge_sort_trace(n)?);
        }
    }

    let jobs: Vec<(usize, Column)> = spec
        .axis
        .iter()
        .flat_map(|&a| spec.columns.iter().map(move |&c| (a, c)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(axis, column)| {
            let trace = &traces[&spec.list_len_at(axis)];
            simulate_with(trace, &spec.config_for(column, axis), spec.options)
                .map(|s| s.report())
                .map_err(|source| ExperimentError::Cell {
                    column,
                    axis,
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let width = spec.columns.len();
    let cells = reports.chunks(width).map(<[_]>::to_vec).collect();
    Ok(SweepTable {
        spec: spec.clone(),
        cells,
    })
}

/// Relative miss-rate reduction of `better` against `baseline`, in percent.
pub fn improvement(better: f64, baseline: f64) -> Result<f64, ExperimentError> {
    let in_range = |x: f64| (0.0..=1.0).contains(&x);
    if !in_range(better) || !in_range(baseline) {
        return Err(ExperimentError::RateOutOfRange { better, baseline });
    }
    if baseline == 0.0 {
        return Err(ExperimentError::UndefinedImprovement);
    }
    Ok((baseline - better) / baseline * 100.0)
}

/// Smallest and largest improvement of `better` over `baseline` across the
/// axis, skipping cells where the baseline is zero.
pub fn improvement_band(
    table: &SweepTable,
    better: &Column,
    baseline: &Column,
) -> Option<(f64, f64)> {
    let b = table.column_rates(better)?;
    let base = table.column_rates(baseline)?;
    b.iter()
        .zip(&base)
        .filter_map(|(&x, &y)| improvement(x, y).ok())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Gnuplot,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            "gnuplot" | "gnuplot-data" => Ok(Format::Gnuplot),
            other => Err(format!(
                "unknown format `{other}` (expected csv, md or gnuplot)"
            )),
        }
    }
}

/// Renders rates as percentages with two decimals.
pub fn render(table: &SweepTable, format: Format) -> String {
    let labels: Vec<String> = table.columns().iter().map(ToString::to_string).collect();
    let rows: Vec<(usize, Vec<String>)> = table
        .axis()
        .iter()
        .enumerate()
        .map(|(a, &axis)| {
            let vals = (0..labels.len())
                .map(|c| percent(table.rate(a, c)))
                .collect();
            (axis, vals)
        })
        .collect();

    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(out, "axis,{}", labels.join(","));
            for (axis, vals) in &rows {
                let _ = writeln!(out, "{axis},{}", vals.join(","));
            }
        }
        Format::Markdown => {
            let _ = writeln!(out, "| axis | {} |", labels.join(" | "));
            let _ = writeln!(out, "|---:|{}", "---:|".repeat(labels.len()));
            for (axis, vals) in &rows {
                let _ = writeln!(out, "| {axis} | {} |", vals.join(" | "));
            }
        }
        Format::Gnuplot => {
            let _ = writeln!(out, "# axis {}", labels.join(" "));
            for (axis, vals) in &rows {
                let _ = writeln!(out, "{axis} {}", vals.join(" "));
            }
        }
    }
    out
}
