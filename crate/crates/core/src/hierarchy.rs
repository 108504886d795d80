//! Single-level and exclusive two-level cache simulation.
//!
//! In the two-level configuration a block lives in at most one level. An L1
//! miss looks the block up in L2 first; an L2 hit moves the block out of L2.
//! The block is then inserted into L1, and whatever L1 evicts is demoted into
//! L2. Blocks evicted from L2 are dropped.

use thiserror::Error;

use crate::policy::{PolicyError, PolicyKind, PolicySpec, ReplacementPolicy};
use crate::trace::{BlockId, Trace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelConfig {
    pub capacity: usize,
    pub policy: PolicySpec,
}

impl LevelConfig {
    pub fn new(capacity: usize, policy: PolicySpec) -> Self {
        LevelConfig { capacity, policy }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyConfig {
    pub l1: LevelConfig,
    pub l2: Option<LevelConfig>,
}

impl HierarchyConfig {
    pub fn single(capacity: usize, policy: PolicySpec) -> Self {
        HierarchyConfig {
            l1: LevelConfig::new(capacity, policy),
            l2: None,
        }
    }

    pub fn two_level(
        l1_capacity: usize,
        l1_policy: PolicySpec,
        l2_capacity: usize,
        l2_policy: PolicySpec,
    ) -> Self {
        HierarchyConfig {
            l1: LevelConfig::new(l1_capacity, l1_policy),
            l2: Some(LevelConfig::new(l2_capacity, l2_policy)),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.l1.capacity == 0 {
            return Err(SimError::Config("l1 capacity must be at least 1".into()));
        }
        if let Some(l2) = &self.l2 {
            match l2.policy.kind() {
                PolicyKind::PbrL1 => {
                    return Err(SimError::Config(
                        "pbr needs phase tags and is only allowed at l1".into(),
                    ))
                }
                PolicyKind::Opt => {
                    return Err(SimError::Config(
                        "opt needs the l2 reference stream in advance and is only allowed at l1"
                            .into(),
                    ))
                }
                _ => {}
            }
            if l2.capacity < self.l1.capacity {
                return Err(SimError::Config(format!(
                    "l2 capacity {} is smaller than l1 capacity {}",
                    l2.capacity, self.l1.capacity
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("invariant violated at event {event}: {detail}")]
    Invariant { event: usize, detail: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// Check exclusivity, residency bounds and counter identities after every event.
    pub validate: bool,
    /// Replay the trace once unmeasured before the measured pass.
    pub warmup: bool,
}

impl SimOptions {
    pub fn validating() -> Self {
        SimOptions {
            validate: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimStats {
    pub two_level: bool,
    pub refs: u64,
    pub l1_hits: u64,
    pub l1_misses: u64,
    pub l2_accesses: u64,
    pub l2_hits: u64,
    pub l2_misses: u64,
    pub memory_fetches: u64,
    /// First-ever references to a block.
    pub compulsory_misses: u64,
    pub demotions_to_l2: u64,
    pub l2_evictions_to_memory: u64,
}

impl SimStats {
    /// Checks the counter identities that must hold after any prefix of a run.
    pub fn check_identities(&self) -> Result<(), String> {
        let mut broken = Vec::new();
        if self.l1_hits + self.l1_misses != self.refs {
            broken.push("l1_hits + l1_misses != refs");
        }
        if self.two_level {
            if self.l2_accesses != self.l1_misses {
                broken.push("l2_accesses != l1_misses");
            }
            if self.l2_hits + self.l2_misses != self.l2_accesses {
                broken.push("l2_hits + l2_misses != l2_accesses");
            }
            if self.memory_fetches != self.l2_misses {
                broken.push("memory_fetches != l2_misses");
            }
        } else {
            if self.memory_fetches != self.l1_misses {
                broken.push("memory_fetches != l1_misses");
            }
            if self.l2_accesses + self.l2_hits + self.l2_misses + self.demotions_to_l2 != 0 {
                broken.push("l2 counters nonzero without l2");
            }
        }
        if self.compulsory_misses > self.memory_fetches {
            broken.push("compulsory_misses > memory_fetches");
        }
        if self.l2_evictions_to_memory > self.demotions_to_l2 {
            broken.push("l2_evictions_to_memory > demotions_to_l2");
        }
        if broken.is_empty() {
            Ok(())
        } else {
            Err(broken.join(", "))
        }
    }

    pub fn report(&self) -> MissRateReport {
        let comp = self.compulsory_misses;
        let rate = |num: u64, den: u64| RatePair {
            raw: ratio(num, den),
            nocomp: ratio(num.saturating_sub(comp), den),
        };
        MissRateReport {
            l1: rate(self.l1_misses, self.refs),
            l2_local: rate(self.l2_misses, self.l2_accesses),
            global: rate(self.memory_fetches, self.refs),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Whether compulsory misses count toward a miss rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    Raw,
    #[default]
    NoComp,
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Metric::Raw),
            "nocomp" => Ok(Metric::NoComp),
            other => Err(format!("unknown metric `{other}` (expected raw or nocomp)")),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Raw => "raw",
            Metric::NoComp => "nocomp",
        })
    }
}

/// One miss rate, with and without compulsory misses in the numerator.
/// Values are fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub raw: f64,
    pub nocomp: f64,
}

impl RatePair {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Raw => self.raw,
            Metric::NoComp => self.nocomp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissRateReport {
    pub l1: RatePair,
    /// L2 misses over L2 accesses; zero when L2 saw no accesses.
    pub l2_local: RatePair,
    /// Memory fetches over references.
    pub global: RatePair,
}

/// Formats a fraction as a percentage with two decimals.
pub fn percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

/// A running simulation over one configuration.
#[derive(Debug)]
pub struct Hierarchy {
    l1: Box<dyn ReplacementPolicy>,
    l2: Option<Box<dyn ReplacementPolicy>>,
    seen: Vec<bool>,
    stats: SimStats,
    validate: bool,
    position: usize,
}

impl Hierarchy {
    /// Builds empty caches for `config`. `trace` feeds OPT at L1 and sizes the
    /// first-touch table.
    pub fn new(config: &HierarchyConfig, trace: &Trace, validate: bool) -> Result<Self, SimError> {
        config.validate()?;
        let l1 = config.l1.policy.build(config.l1.capacity, Some(trace))?;
        let l2 = match &config.l2 {
            Some(level) => Some(level.policy.build(level.capacity, None)?),
            None => None,
        };
        Ok(Hierarchy {
            l1,
            l2,
            seen: vec![false; trace.list_len()],
            stats: SimStats {
                two_level: config.l2.is_some(),
                ..Default::default()
            },
            validate,
            position: 0,
        })
    }

    pub fn stats(&self) -> &SimStats {
        &self.stats
    }

    pub fn l1(&self) -> &dyn ReplacementPolicy {
        self.l1.as_ref()
    }

    pub fn l2(&self) -> Option<&dyn ReplacementPolicy> {
        self.l2.as_deref()
    }

    /// Clears counters but keeps cache contents and first-touch history.
    pub fn clear_stats(&mut self) {
        self.stats = SimStats {
            two_level: self.stats.two_level,
            ..Default::default()
        };
    }

    /// Processes one reference.
    pub fn step(&mut self, event: TraceEvent) -> Result<(), SimError> {
        let block = event.block;
        let idx = block.0 as usize;
        if idx >= self.seen.len() {
            self.seen.resize(idx + 1, false);
        }
        self.stats.refs += 1;
        if !self.seen[idx] {
            self.seen[idx] = true;
            self.stats.compulsory_misses += 1;
        }

        let was_resident = self.validate && self.l1.contains(block);
        let outcome = self.l1.access(block, Some(event.phase))?;
        if self.validate && was_resident != outcome.hit {
            return Err(self.violation(format!(
                "l1 reported hit={} for block {block}, resident before={was_resident}",
                outcome.hit
            )));
        }
        if outcome.hit {
            self.stats.l1_hits += 1;
            return self.post_check(block);
        }
        self.stats.l1_misses += 1;

        match self.l2.as_mut() {
            None => self.stats.memory_fetches += 1,
            Some(l2) => {
                // lookup before the victim is demoted
                self.stats.l2_accesses += 1;
                if l2.remove(block) {
                    self.stats.l2_hits += 1;
                } else {
                    self.stats.l2_misses += 1;
                    self.stats.memory_fetches += 1;
                }
                if let Some(victim) = outcome.evicted {
                    self.stats.demotions_to_l2 += 1;
                    let demoted = l2.access(victim, None)?;
                    if demoted.hit && self.validate {
                        return Err(self.violation(format!(
                            "demoted block {victim} was already resident in l2"
                        )));
                    }
                    if demoted.evicted.is_some() {
                        self.stats.l2_evictions_to_memory += 1;
                    }
                }
            }
        }
        if self.validate {
            if let Some(victim) = outcome.evicted {
                if victim == block || self.l1.contains(victim) {
                    return Err(self.violation(format!("l1 victim {victim} still resident")));
                }
            }
            if !self.l1.contains(block) {
                return Err(self.violation(format!("block {block} not resident after miss")));
            }
        }
        self.post_check(block)
    }

    fn post_check(&mut self, block: BlockId) -> Result<(), SimError> {
        if self.validate {
            self.validate_state(block)?;
        }
        self.position += 1;
        Ok(())
    }

    // O(1) per event: identities, capacity bounds and exclusivity of the
    // referenced block. Exclusivity holds by induction because a step only
    // changes residency for the referenced block and the victims, and the
    // victims have already been checked out of L1.
    fn validate_state(&self, block: BlockId) -> Result<(), SimError> {
        if let Err(detail) = self.stats.check_identities() {
            return Err(self.violation(detail));
        }
        self.check_bound("l1", self.l1.as_ref())?;
        if let Some(l2) = self.l2.as_deref() {
            self.check_bound("l2", l2)?;
            if l2.contains(block) {
                return Err(self.violation(format!("block {block} resident in both levels")));
            }
        }
        Ok(())
    }

    fn check_bound(&self, name: &str, level: &dyn ReplacementPolicy) -> Result<(), SimError> {
        if level.len() > level.capacity() {
            return Err(self.violation(format!(
                "{name} holds {} blocks over capacity {}",
                level.len(),
                level.capacity()
            )));
        }
        Ok(())
    }

    /// Full scan: internal consistency of both policies and no block in both
    /// levels. Linear in the cache sizes.
    pub fn audit(&self) -> Result<(), SimError> {
        self.l1
            .check_consistency()
            .map_err(|e| self.violation(format!("l1: {e}")))?;
        if let Some(l2) = self.l2.as_deref() {
            l2.check_consistency()
                .map_err(|e| self.violation(format!("l2: {e}")))?;
            if let Some(dup) = self.l1.resident().into_iter().find(|b| l2.contains(*b)) {
                return Err(self.violation(format!("block {dup} resident in both levels")));
            }
        }
        Ok(())
    }

    fn violation(&self, detail: String) -> SimError {
        SimError::Invariant {
            event: self.position,
            detail,
        }
    }
}

/// Runs `trace` through a cold hierarchy.
pub fn simulate(trace: &Trace, config: &HierarchyConfig) -> Result<SimStats, SimError> {
    simulate_with(trace, config, SimOptions::default())
}

pub fn simulate_with(
    trace: &Trace,
    config: &HierarchyConfig,
    options: SimOptions,
) -> Result<SimStats, SimError> {
    if options.warmup {
        // OPT must see both passes in advance, so simulate the doubled trace
        let doubled: Vec<TraceEvent> = trace
            .events()
            .iter()
            .chain(trace.events())
            .copied()
            .collect();
        let doubled = Trace::new(trace.list_len(), doubled).expect("blocks already validated");
        let mut h = Hierarchy::new(config, &doubled, options.validate)?;
        for &ev in trace.events() {
            h.step(ev)?;
        }
        h.clear_stats();
        for &ev in trace.events() {
            h.step(ev)?;
        }
        if options.validate {
            h.audit()?;
        }
        return Ok(h.stats);
    }
    let mut h = Hierarchy::new(config, trace, options.validate)?;
    for &ev in trace.events() {
        h.step(ev)?;
    }
    if options.validate {
        h.audit()?;
    }
    Ok(h.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{generate_merge_sort_trace, Phase};

    fn blocks(list: &[u32]) -> Trace {
        Trace::from_blocks(16, list, Phase::FinalMerge).unwrap()
    }

    #[test]
    fn one_block_repeated() {
        let trace = blocks(&[7; 10]);
        for policy in [
            PolicySpec::Lru,
            PolicySpec::Fifo,
            PolicySpec::Lfu,
            PolicySpec::Opt,
        ] {
            let s = simulate_with(
                &trace,
                &HierarchyConfig::single(1, policy),
                SimOptions::validating(),
            )
            .unwrap();
            assert_eq!(
                (s.refs, s.l1_misses, s.l1_hits, s.compulsory_misses),
                (10, 1, 9, 1)
            );
        }
    }

    #[test]
    fn no_pressure_means_compulsory_only() {
        let trace = generate_merge_sort_trace(16).unwrap();
        let cfg = HierarchyConfig::two_level(16, PolicySpec::Lru, 32, PolicySpec::Fifo);
        let s = simulate_with(&trace, &cfg, SimOptions::validating()).unwrap();
        assert_eq!(s.l1_misses, s.compulsory_misses);
        assert_eq!(s.l2_accesses, 16);
        assert_eq!(s.l2_hits, 0);
        assert_eq!(s.demotions_to_l2, 0);
    }

    #[test]
    fn l2_lookup_precedes_demotion() {
        // a,b,c,a with L1 = 1 FIFO, L2 = 2 FIFO: the final a is found in L2
        // before c's demotion could push it out
        let trace = blocks(&[0, 1, 2, 0]);
        let cfg = HierarchyConfig::two_level(1, PolicySpec::Fifo, 2, PolicySpec::Fifo);
        let s = simulate_with(&trace, &cfg, SimOptions::validating()).unwrap();
        assert_eq!(s.l2_hits, 1);
        assert_eq!(s.memory_fetches, 3);
        assert_eq!(s.demotions_to_l2, 3);
        assert_eq!(s.l2_evictions_to_memory, 0);
    }

    #[test]
    fn config_errors() {
        let trace = blocks(&[0]);
        let bad = [
            HierarchyConfig::two_level(4, PolicySpec::Fifo, 8, PolicySpec::pbr()),
            HierarchyConfig::two_level(4, PolicySpec::Fifo, 8, PolicySpec::Opt),
            HierarchyConfig::two_level(8, PolicySpec::Fifo, 4, PolicySpec::Fifo),
            HierarchyConfig::single(0, PolicySpec::Lru),
        ];
        for cfg in bad {
            assert!(
                matches!(simulate(&trace, &cfg), Err(SimError::Config(_))),
                "{cfg:?}"
            );
        }
        assert!(matches!(
            simulate(&trace, &HierarchyConfig::single(2, PolicySpec::pbr())),
            Err(SimError::Policy(PolicyError::InvalidPartition { .. }))
        ));
    }

    #[test]
    fn report_rates() {
        let s = SimStats {
            two_level: true,
            refs: 200,
            l1_hits: 100,
            l1_misses: 100,
            l2_accesses: 100,
            l2_hits: 60,
            l2_misses: 40,
            memory_fetches: 40,
            compulsory_misses: 30,
            demotions_to_l2: 90,
            l2_evictions_to_memory: 10,
        };
        s.check_identities().unwrap();
        let r = s.report();
        assert_eq!(r.l1.raw, 0.5);
        assert_eq!(r.l1.nocomp, 0.35);
        assert_eq!(r.l2_local.raw, 0.4);
        assert_eq!(r.l2_local.nocomp, 0.1);
        assert_eq!(r.global.raw, 0.2);
        assert_eq!(r.global.nocomp, 0.05);
        assert_eq!(percent(1.0 / 8.0), "12.50");
    }

    #[test]
    fn empty_run_reports_zero() {
        let s = simulate(
            &generate_merge_sort_trace(1).unwrap(),
            &HierarchyConfig::single(1, PolicySpec::Fifo),
        )
        .unwrap();
        let r = s.report();
        assert_eq!((r.l1.raw, r.l2_local.raw, r.global.raw), (0.0, 0.0, 0.0));
    }

    #[test]
    fn warmup_removes_compulsory() {
        let trace = generate_merge_sort_trace(8).unwrap();
        for policy in [PolicySpec::Fifo, PolicySpec::Opt, PolicySpec::pbr()] {
            let cfg = HierarchyConfig::single(4, policy);
            let s = simulate_with(
                &trace,
                &cfg,
                SimOptions {
                    validate: true,
                    warmup: true,
                },
            )
            .unwrap();
            assert_eq!(s.refs, trace.len() as u64);
            assert_eq!(s.compulsory_misses, 0);
        }
        let big = HierarchyConfig::single(8, PolicySpec::Lru);
        let warm = simulate_with(
            &trace,
            &big,
            SimOptions {
                validate: false,
                warmup: true,
            },
        )
        .unwrap();
        assert_eq!(warm.l1_misses, 0);
    }
}
