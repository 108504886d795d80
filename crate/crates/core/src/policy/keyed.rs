use std::collections::{BTreeMap, HashMap};

use crate::trace::BlockId;

/// Resident blocks ordered by a policy-specific key.
///
/// Victim selection is `pop_first` or `pop_last` depending on the policy.
#[derive(Debug, Clone, Default)]
pub(crate) struct KeyedSet<K: Ord + Copy> {
    by_key: BTreeMap<K, BlockId>,
    key_of: HashMap<BlockId, K>,
}

impl<K: Ord + Copy> KeyedSet<K> {
    pub fn new() -> Self {
        KeyedSet {
            by_key: BTreeMap::new(),
            key_of: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.key_of.len()
    }

    pub fn contains(&self, block: BlockId) -> bool {
        self.key_of.contains_key(&block)
    }

    pub fn key(&self, block: BlockId) -> Option<K> {
        self.key_of.get(&block).copied()
    }

    /// Inserts or re-keys `block`.
    pub fn set(&mut self, block: BlockId, key: K) {
        if let Some(old) = self.key_of.insert(block, key) {
            self.by_key.remove(&old);
        }
        let prev = self.by_key.insert(key, block);
        debug_assert!(prev.is_none(), "duplicate key");
    }

    pub fn remove(&mut self, block: BlockId) -> bool {
        match self.key_of.remove(&block) {
            Some(key) => {
                self.by_key.remove(&key);
                true
            }
            None => false,
        }
    }

    pub fn pop_first(&mut self) -> Option<BlockId> {
        let (_, block) = self.by_key.pop_first()?;
        self.key_of.remove(&block);
        Some(block)
    }

    pub fn pop_last(&mut self) -> Option<BlockId> {
        let (_, block) = self.by_key.pop_last()?;
        self.key_of.remove(&block);
        Some(block)
    }

    pub fn clear(&mut self) {
        self.by_key.clear();
        self.key_of.clear();
    }

    pub fn blocks(&self) -> Vec<BlockId> {
        let mut v: Vec<BlockId> = self.key_of.keys().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn in_key_order(&self) -> Vec<BlockId> {
        self.by_key.values().copied().collect()
    }

    /// Both indexes describe the same set of blocks.
    pub fn is_consistent(&self) -> bool {
        self.by_key.len() == self.key_of.len()
            && self
                .by_key
                .iter()
                .all(|(k, b)| self.key_of.get(b).is_some_and(|kk| kk == k))
    }
}
