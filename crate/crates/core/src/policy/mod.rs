//! Replacement policies behind one interface.
//!
//! Every policy tracks a resident set of at most `capacity` blocks. A call to
//! [`ReplacementPolicy::access`] reports whether the block was already resident
//! and, on a miss into a full cache, which block was displaced.

mod fifo;
mod keyed;
mod lfu;
mod lru;
mod opt;
mod pbr;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::trace::{BlockId, Phase, Trace};

pub use fifo::Fifo;
pub use lfu::Lfu;
pub use lru::Lru;
pub use opt::{prepare_opt, Opt};
pub use pbr::{Partition, Pbr, PbrConfig, DEFAULT_PBR_FIXED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Lru,
    Fifo,
    Lfu,
    PbrL1,
    Opt,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Lru => "lru",
            PolicyKind::Fifo => "fifo",
            PolicyKind::Lfu => "lfu",
            PolicyKind::PbrL1 => "pbr",
            PolicyKind::Opt => "opt",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessOutcome {
    pub hit: bool,
    pub evicted: Option<BlockId>,
}

impl AccessOutcome {
    pub const HIT: AccessOutcome = AccessOutcome {
        hit: true,
        evicted: None,
    };

    pub fn miss(evicted: Option<BlockId>) -> Self {
        AccessOutcome {
            hit: false,
            evicted,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("pbr fixed partition must satisfy 1 <= f < capacity (f={fixed}, capacity={capacity})")]
    InvalidPartition { fixed: usize, capacity: usize },
    #[error("unknown policy `{0}` (expected lru, fifo, lfu, pbr, pbr:f=<k> or opt)")]
    UnknownPolicy(String),
    #[error("pbr requires a phase tag on every access")]
    MissingPhase,
    #[error("opt requires the full trace in advance")]
    OptWithoutTrace,
    #[error("opt accessed {got} at position {position}, but the prepared trace has {expected}")]
    OptOutOfOrder {
        position: usize,
        expected: BlockId,
        got: BlockId,
    },
    #[error("opt accessed beyond its prepared trace of {len} events")]
    OptExhausted { len: usize },
    #[error("inconsistent {policy} bookkeeping: {detail}")]
    Inconsistent { policy: PolicyKind, detail: String },
}

/// Common interface of all replacement policies.
pub trait ReplacementPolicy: fmt::Debug + Send {
    fn kind(&self) -> PolicyKind;

    fn capacity(&self) -> usize;

    /// Number of resident blocks.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn contains(&self, block: BlockId) -> bool;

    /// References `block`, inserting it on a miss.
    ///
    /// `phase` is required by PBR and ignored by every other policy.
    fn access(
        &mut self,
        block: BlockId,
        phase: Option<Phase>,
    ) -> Result<AccessOutcome, PolicyError>;

    /// Drops `block` without counting a reference. Returns whether it was resident.
    fn remove(&mut self, block: BlockId) -> bool;

    /// Empties the cache and clears all counters; capacity and configuration stay.
    fn reset(&mut self);

    /// Resident blocks in ascending id order.
    fn resident(&self) -> Vec<BlockId>;

    /// Checks that the bookkeeping mentions exactly the resident blocks.
    fn check_consistency(&self) -> Result<(), PolicyError>;
}

/// A policy choice as named on the command line: `lru`, `fifo`, `lfu`,
/// `pbr`, `pbr:f=<k>` or `opt` (case-insensitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicySpec {
    Lru,
    Fifo,
    Lfu,
    Pbr { fixed: usize },
    Opt,
}

impl PolicySpec {
    pub fn pbr() -> Self {
        PolicySpec::Pbr {
            fixed: DEFAULT_PBR_FIXED,
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            PolicySpec::Lru => PolicyKind::Lru,
            PolicySpec::Fifo => PolicyKind::Fifo,
            PolicySpec::Lfu => PolicyKind::Lfu,
            PolicySpec::Pbr { .. } => PolicyKind::PbrL1,
            PolicySpec::Opt => PolicyKind::Opt,
        }
    }

    /// Instantiates the policy. `trace` is needed only for OPT.
    pub fn build(
        &self,
        capacity: usize,
        trace: Option<&Trace>,
    ) -> Result<Box<dyn ReplacementPolicy>, PolicyError> {
        Ok(match *self {
            PolicySpec::Lru => Box::new(Lru::new(capacity)?),
            PolicySpec::Fifo => Box::new(Fifo::new(capacity)?),
            PolicySpec::Lfu => Box::new(Lfu::new(capacity)?),
            PolicySpec::Pbr { fixed } => Box::new(Pbr::new(PbrConfig::new(fixed, capacity)?)),
            PolicySpec::Opt => {
                let trace = trace.ok_or(PolicyError::OptWithoutTrace)?;
                Box::new(prepare_opt(trace, capacity)?)
            }
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Pbr { fixed } if *fixed != DEFAULT_PBR_FIXED => write!(f, "pbr:f={fixed}"),
            other => other.kind().fmt(f),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let spec = match lower.as_str() {
            "lru" => PolicySpec::Lru,
            "fifo" => PolicySpec::Fifo,
            "lfu" => PolicySpec::Lfu,
            "opt" => PolicySpec::Opt,
            "pbr" | "pbr_l1" => PolicySpec::pbr(),
            other => {
                let fixed = other
                    .strip_prefix("pbr:f=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&f| f >= 1)
                    .ok_or_else(|| PolicyError::UnknownPolicy(s.to_string()))?;
                PolicySpec::Pbr { fixed }
            }
        };
        Ok(spec)
    }
}

fn check_capacity(capacity: usize) -> Result<(), PolicyError> {
    if capacity == 0 {
        Err(PolicyError::ZeroCapacity)
    } else {
        Ok(())
    }
}
