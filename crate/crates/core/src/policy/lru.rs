use super::keyed::KeyedSet;
use super::{check_capacity, AccessOutcome, PolicyError, PolicyKind, ReplacementPolicy};
use crate::trace::{BlockId, Phase};

/// Least recently used.
#[derive(Debug, Clone)]
pub struct Lru {
    capacity: usize,
    clock: u64,
    blocks: KeyedSet<u64>,
}

impl Lru {
    pub fn new(capacity: usize) -> Result<Self, PolicyError> {
        check_capacity(capacity)?;
        Ok(Lru {
            capacity,
            clock: 0,
            blocks: KeyedSet::new(),
        })
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }
}

impl ReplacementPolicy for Lru {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Lru
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
        let now = self.tick();
        if self.blocks.contains(block) {
            self.blocks.set(block, now);
            return Ok(AccessOutcome::HIT);
        }
        let evicted = if self.blocks.len() >= self.capacity {
            self.blocks.pop_first()
        } else {
            None
        };
        self.blocks.set(block, now);
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
                policy: PolicyKind::Lru,
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
