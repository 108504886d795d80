//! Belady's offline optimal policy, used as a test oracle.

use std::cmp::Reverse;
use std::collections::HashMap;

use super::keyed::KeyedSet;
use super::{check_capacity, AccessOutcome, PolicyError, PolicyKind, ReplacementPolicy};
use crate::trace::{BlockId, Phase, Trace};

const NEVER: usize = usize::MAX;

/// Evicts the resident block whose next use lies farthest ahead. Blocks never
/// used again go first, lowest id first.
///
/// Accesses must replay the prepared trace in order.
#[derive(Debug, Clone)]
pub struct Opt {
    capacity: usize,
    blocks: Vec<BlockId>,
    next_use: Vec<usize>,
    cursor: usize,
    resident: KeyedSet<(usize, Reverse<BlockId>)>,
}

/// Precomputes next-use positions for every event of `trace`.
pub fn prepare_opt(trace: &Trace, capacity: usize) -> Result<Opt, PolicyError> {
    check_capacity(capacity)?;
    let blocks: Vec<BlockId> = trace.events().iter().map(|e| e.block).collect();
    let mut next_use = vec![NEVER; blocks.len()];
    let mut later: HashMap<BlockId, usize> = HashMap::new();
    for (i, &b) in blocks.iter().enumerate().rev() {
        next_use[i] = later.insert(b, i).unwrap_or(NEVER);
    }
    Ok(Opt {
        capacity,
        blocks,
        next_use,
        cursor: 0,
        resident: KeyedSet::new(),
    })
}

impl Opt {
    pub fn position(&self) -> usize {
        self.cursor
    }
}

impl ReplacementPolicy for Opt {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Opt
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.resident.len()
    }

    fn contains(&self, block: BlockId) -> bool {
        self.resident.contains(block)
    }

    fn access(&mut self, block: BlockId, _: Option<Phase>) -> Result<AccessOutcome, PolicyError> {
        let pos = self.cursor;
        let expected = *self.blocks.get(pos).ok_or(PolicyError::OptExhausted {
            len: self.blocks.len(),
        })?;
        if expected != block {
            return Err(PolicyError::OptOutOfOrder {
                position: pos,
                expected,
                got: block,
            });
        }
        self.cursor += 1;
        let key = (self.next_use[pos], Reverse(block));
        if self.resident.contains(block) {
            self.resident.set(block, key);
            return Ok(AccessOutcome::HIT);
        }
        let evicted = if self.resident.len() >= self.capacity {
            self.resident.pop_last()
        } else {
            None
        };
        self.resident.set(block, key);
        Ok(AccessOutcome::miss(evicted))
    }

    fn remove(&mut self, block: BlockId) -> bool {
        self.resident.remove(block)
    }

    fn reset(&mut self) {
        self.cursor = 0;
        self.resident.clear();
    }

    fn resident(&self) -> Vec<BlockId> {
        self.resident.blocks()
    }

    fn check_consistency(&self) -> Result<(), PolicyError> {
        if !self.resident.is_consistent() || self.resident.len() > self.capacity {
            return Err(PolicyError::Inconsistent {
                policy: PolicyKind::Opt,
                detail: format!(
                    "{} entries for capacity {}",
                    self.resident.len(),
                    self.capacity
                ),
            });
        }
        Ok(())
    }
}
