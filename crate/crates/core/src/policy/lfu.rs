use super::keyed::KeyedSet;
use super::{check_capacity, AccessOutcome, PolicyError, PolicyKind, ReplacementPolicy};
use crate::trace::{BlockId, Phase};

/// Least frequently used, ties broken by least recent use.
///
/// Frequencies count references since the block last entered the cache; an
/// evicted block starts over at 1.
#[derive(Debug, Clone)]
pub struct Lfu {
    capacity: usize,
    clock: u64,
    // key: (frequency, last-use tick)
    blocks: KeyedSet<(u64, u64)>,
}

impl Lfu {
    pub fn new(capacity: usize) -> Result<Self, PolicyError> {
        check_capacity(capacity)?;
        Ok(Lfu {
            capacity,
            clock: 0,
            blocks: KeyedSet::new(),
        })
    }

    pub fn frequency(&self, block: BlockId) -> Option<u64> {
        self.blocks.key(block).map(|(f, _)| f)
    }
}

impl ReplacementPolicy for Lfu {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Lfu
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.blocks.len()
    }

    fn contains(&self, block: BlockId) -> bool {
        self.blocks.contains(block)
    }

    fn access(&mut self, block: BlockId, _: Option<Phase>) -> Result<AccessOutcome, PolicyError> {
        self.clock += 1;
        if let Some((freq, _)) = self.blocks.key(block) {
            self.blocks.set(block, (freq + 1, self.clock));
            return Ok(AccessOutcome::HIT);
        }
        let evicted = if self.blocks.len() >= self.capacity {
            self.blocks.pop_first()
        } else {
            None
        };
        self.blocks.set(block, (1, self.clock));
        Ok(AccessOutcome::miss(evicted))
    }

    fn remove(&mut self, block: BlockId) -> bool {
        self.blocks.remove(block)
    }

    fn reset(&mut self) {
        self.clock = 0;
        self.blocks.clear();
    }

    fn resident(&self) -> Vec<BlockId> {
        self.blocks.blocks()
    }

    fn check_consistency(&self) -> Result<(), PolicyError> {
        if !self.blocks.is_consistent() || self.blocks.len() > self.capacity {
            return Err(PolicyError::Inconsistent {
                policy: PolicyKind::Lfu,
                detail: format!(
                    "{} entries for capacity {}",
                    self.blocks.len(),
                    self.capacity
                ),
            });
        }
        Ok(())
    }
}
