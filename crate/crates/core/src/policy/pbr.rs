//! Partition-based replacement for the first cache level.
//!
//! The cache is split into a small fixed partition and a large variable
//! partition. Lookups search both. On a miss the reference's phase picks the
//! partition that receives the block: references made while building either
//! sorted half go to the fixed partition, references of the final merge go to
//! the variable partition. Each partition is FIFO and only evicts its own
//! blocks, so a block lives in at most one partition.

use super::fifo::Fifo;
use super::{AccessOutcome, PolicyError, PolicyKind, ReplacementPolicy};
use crate::trace::{BlockId, Phase};

pub const DEFAULT_PBR_FIXED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PbrConfig {
    fixed: usize,
    capacity: usize,
}

impl PbrConfig {
    /// Requires `1 <= fixed < capacity`.
    pub fn new(fixed: usize, capacity: usize) -> Result<Self, PolicyError> {
        if fixed == 0 || fixed >= capacity {
            return Err(PolicyError::InvalidPartition { fixed, capacity });
        }
        Ok(PbrConfig { fixed, capacity })
    }

    pub fn fixed(&self) -> usize {
        self.fixed
    }

    pub fn variable(&self) -> usize {
        self.capacity - self.fixed
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Fixed,
    Variable,
}

impl Partition {
    pub fn for_phase(phase: Phase) -> Partition {
        match phase {
            Phase::BuildLeft | Phase::BuildRight => Partition::Fixed,
            Phase::FinalMerge => Partition::Variable,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pbr {
    config: PbrConfig,
    fixed: Fifo,
    variable: Fifo,
}

impl Pbr {
    pub fn new(config: PbrConfig) -> Self {
        // both sizes are >= 1 by construction of PbrConfig
        Pbr {
            config,
            fixed: Fifo::new(config.fixed()).expect("fixed partition is non-empty"),
            variable: Fifo::new(config.variable()).expect("variable partition is non-empty"),
        }
    }

    pub fn config(&self) -> PbrConfig {
        self.config
    }

    /// Resident blocks of one partition, ascending.
    pub fn partition_resident(&self, partition: Partition) -> Vec<BlockId> {
        self.part(partition).resident()
    }

    fn part(&self, partition: Partition) -> &Fifo {
        match partition {
            Partition::Fixed => &self.fixed,
            Partition::Variable => &self.variable,
        }
    }

    fn part_mut(&mut self, partition: Partition) -> &mut Fifo {
        match partition {
            Partition::Fixed => &mut self.fixed,
            Partition::Variable => &mut self.variable,
        }
    }
}

impl ReplacementPolicy for Pbr {
    fn kind(&self) -> PolicyKind {
        PolicyKind::PbrL1
    }

    fn capacity(&self) -> usize {
        self.config.capacity
    }

    fn len(&self) -> usize {
        self.fixed.len() + self.variable.len()
    }

    fn contains(&self, block: BlockId) -> bool {
        self.fixed.contains(block) || self.variable.contains(block)
    }

    fn access(
        &mut self,
        block: BlockId,
        phase: Option<Phase>,
    ) -> Result<AccessOutcome, PolicyError> {
        let phase = phase.ok_or(PolicyError::MissingPhase)?;
        if self.contains(block) {
            return Ok(AccessOutcome::HIT);
        }
        self.part_mut(Partition::for_phase(phase))
            .access(block, None)
    }

    fn remove(&mut self, block: BlockId) -> bool {
        self.fixed.remove(block) || self.variable.remove(block)
    }

    fn reset(&mut self) {
        self.fixed.reset();
        self.variable.reset();
    }

    fn resident(&self) -> Vec<BlockId> {
        let mut v = self.fixed.resident();
        v.extend(self.variable.resident());
        v.sort_unstable();
        v
    }

    fn check_consistency(&self) -> Result<(), PolicyError> {
        self.fixed.check_consistency()?;
        self.variable.check_consistency()?;
        if let Some(dup) = self
            .fixed
            .resident()
            .into_iter()
            .find(|b| self.variable.contains(*b))
        {
            return Err(PolicyError::Inconsistent {
                policy: PolicyKind::PbrL1,
                detail: format!("block {dup} resident in both partitions"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pbr(fixed: usize, capacity: usize) -> Pbr {
        Pbr::new(PbrConfig::new(fixed, capacity).unwrap())
    }

    #[test]
    fn config_bounds() {
        assert!(PbrConfig::new(0, 4).is_err());
        assert!(PbrConfig::new(4, 4).is_err());
        assert!(PbrConfig::new(1, 1).is_err());
        let c = PbrConfig::new(2, 8).unwrap();
        assert_eq!((c.fixed(), c.variable()), (2, 6));
    }

    #[test]
    fn phase_is_required() {
        let mut p = pbr(1, 3);
        assert_eq!(p.access(BlockId(0), None), Err(PolicyError::MissingPhase));
    }

    #[test]
    fn build_traffic_cannot_evict_merge_blocks() {
        let mut p = pbr(1, 3);
        p.access(BlockId(10), Some(Phase::FinalMerge)).unwrap();
        p.access(BlockId(11), Some(Phase::FinalMerge)).unwrap();
        for b in 0..5 {
            let out = p.access(BlockId(b), Some(Phase::BuildLeft)).unwrap();
            assert!(!out.hit);
            assert_ne!(out.evicted, Some(BlockId(10)));
            assert_ne!(out.evicted, Some(BlockId(11)));
        }
        assert_eq!(
            p.partition_resident(Partition::Variable),
            vec![BlockId(10), BlockId(11)]
        );
        assert_eq!(p.partition_resident(Partition::Fixed), vec![BlockId(4)]);
    }

    #[test]
    fn hit_in_either_partition() {
        let mut p = pbr(1, 3);
        p.access(BlockId(1), Some(Phase::BuildRight)).unwrap();
        p.access(BlockId(2), Some(Phase::FinalMerge)).unwrap();
        assert!(p.access(BlockId(1), Some(Phase::FinalMerge)).unwrap().hit);
        assert!(p.access(BlockId(2), Some(Phase::BuildLeft)).unwrap().hit);
    }

    #[test]
    fn merge_traffic_evicts_fifo_within_variable() {
        let mut p = pbr(1, 3);
        for b in [5, 6, 7] {
            p.access(BlockId(b), Some(Phase::FinalMerge)).unwrap();
        }
        assert_eq!(
            p.partition_resident(Partition::Variable),
            vec![BlockId(6), BlockId(7)]
        );
        assert!(p.partition_resident(Partition::Fixed).is_empty());
    }
}
