use super::keyed::KeyedSet;
use super::{check_capacity, AccessOutcome, PolicyError, PolicyKind, ReplacementPolicy};
use crate::trace::{BlockId, Phase};

/// First in, first out. Hits leave the queue untouched.
#[derive(Debug, Clone)]
pub struct Fifo {
    capacity: usize,
    next_seq: u64,
    queue: KeyedSet<u64>,
}

impl Fifo {
    pub fn new(capacity: usize) -> Result<Self, PolicyError> {
        check_capacity(capacity)?;
        Ok(Fifo {
            capacity,
            next_seq: 0,
            queue: KeyedSet::new(),
        })
    }

    /// Resident blocks from oldest to newest arrival.
    pub fn arrival_order(&self) -> Vec<BlockId> {
        self.queue.in_key_order()
    }
}

impl ReplacementPolicy for Fifo {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Fifo
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.queue.len()
    }

    fn contains(&self, block: BlockId) -> bool {
        self.queue.contains(block)
    }

    fn access(&mut self, block: BlockId, _: Option<Phase>) -> Result<AccessOutcome, PolicyError> {
        if self.queue.contains(block) {
            return Ok(AccessOutcome::HIT);
        }
        let evicted = if self.queue.len() >= self.capacity {
            self.queue.pop_first()
        } else {
            None
        };
        self.queue.set(block, self.next_seq);
        self.next_seq += 1;
        Ok(AccessOutcome::miss(evicted))
    }

    fn remove(&mut self, block: BlockId) -> bool {
        self.queue.remove(block)
    }

    fn reset(&mut self) {
        self.next_seq = 0;
        self.queue.clear();
    }

    fn resident(&self) -> Vec<BlockId> {
        self.queue.blocks()
    }

    fn check_consistency(&self) -> Result<(), PolicyError> {
        if !self.queue.is_consistent() || self.queue.len() > self.capacity {
            return Err(PolicyError::Inconsistent {
                policy: PolicyKind::Fifo,
                detail: format!(
                    "{} entries for capacity {}",
                    self.queue.len(),
                    self.capacity
                ),
            });
        }
        Ok(())
    }
}
