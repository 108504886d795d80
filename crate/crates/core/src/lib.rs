//! Trace-driven simulation of cache replacement policies on merge-sort
//! reference strings.
//!
//! - [`trace`] generates the phase-tagged reference string of merge sort and
//!   reads/writes it as text.
//! - [`policy`] implements LRU, FIFO, LFU, the partition-based PBR policy and
//!   Belady's offline OPT behind [`policy::ReplacementPolicy`].
//! - [`hierarchy`] runs a trace through one cache level or an exclusive
//!   two-level hierarchy and collects [`hierarchy::SimStats`].
//! - [`experiment`] sweeps cache sizes, L2 sizes and list lengths and renders
//!   the resulting tables.
//! - [`cli`] backs the `cachesim` binary.

pub mod cli;
pub mod experiment;
pub mod hierarchy;
pub mod policy;
pub mod trace;

pub use experiment::{
    improvement, render, run_sweep, Column, Format, SweepKind, SweepSpec, SweepTable,
};
pub use hierarchy::{simulate, simulate_with, HierarchyConfig, Metric, SimOptions, SimStats};
pub use policy::{PolicyKind, PolicySpec, ReplacementPolicy};
pub use trace::{
    generate_merge_sort_trace, read_trace, write_trace, BlockId, Phase, Trace, TraceEvent,
};
