//! Merge-sort memory-reference traces.
//!
//! A trace is the sequence of block references made by a top-down recursive
//! merge sort over an `n`-element array, one block per element. Each merge of
//! `[lo, mid)` and `[mid, hi)` copies both runs out (one read per source
//! element, in index order) and then writes the merged output back (one write
//! per destination element, in index order). The auxiliary buffer has no
//! addresses of its own, so only the `n` array blocks are ever referenced and
//! the reference string does not depend on the keys being sorted.
//!
//! Each merge of `m` elements emits `2m` events, so a trace for `n >= 2` holds
//! exactly `2 * n * log2(n)` events.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

/// Identifier of one cache block (one list element index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub u32);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for BlockId {
    fn from(v: u32) -> Self {
        BlockId(v)
    }
}

/// Which part of the sort produced a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// Sorting the left half `[0, n/2)`.
    BuildLeft,
    /// Sorting the right half `[n/2, n)`.
    BuildRight,
    /// The top-level merge of the two sorted halves.
    FinalMerge,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::BuildLeft, Phase::BuildRight, Phase::FinalMerge];

    pub fn letter(self) -> char {
        match self {
            Phase::BuildLeft => 'L',
            Phase::BuildRight => 'R',
            Phase::FinalMerge => 'M',
        }
    }

    pub fn from_letter(c: &str) -> Option<Phase> {
        match c {
            "L" => Some(Phase::BuildLeft),
            "R" => Some(Phase::BuildRight),
            "M" => Some(Phase::FinalMerge),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub block: BlockId,
    pub phase: Phase,
}

impl TraceEvent {
    pub fn new(block: impl Into<BlockId>, phase: Phase) -> Self {
        TraceEvent {
            block: block.into(),
            phase,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("n must be a power of two (got {0})")]
    InvalidLength(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("block {block} out of range for list length {list_len}")]
    BlockOutOfRange { block: BlockId, list_len: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An ordered reference string over blocks `0..list_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    list_len: usize,
    events: Vec<TraceEvent>,
}

impl Trace {
    /// Builds a trace from arbitrary events; every block must be `< list_len`.
    pub fn new(list_len: usize, events: Vec<TraceEvent>) -> Result<Self, TraceError> {
        if list_len == 0 {
            return Err(TraceError::InvalidLength(0));
        }
        if let Some(ev) = events.iter().find(|e| e.block.0 as usize >= list_len) {
            return Err(TraceError::BlockOutOfRange {
                block: ev.block,
                list_len,
            });
        }
        Ok(Trace { list_len, events })
    }

    /// Convenience for tests and examples: all events share one phase.
    pub fn from_blocks(list_len: usize, blocks: &[u32], phase: Phase) -> Result<Self, TraceError> {
        let events = blocks.iter().map(|&b| TraceEvent::new(b, phase)).collect();
        Trace::new(list_len, events)
    }

    pub fn list_len(&self) -> usize {
        self.list_len
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn distinct_blocks(&self) -> usize {
        let mut seen = vec![false; self.list_len];
        let mut count = 0;
        for ev in &self.events {
            let slot = &mut seen[ev.block.0 as usize];
            if !*slot {
                *slot = true;
                count += 1;
            }
        }
        count
    }
}

/// Generates the reference string of merge sort over `n` elements.
///
/// `n` must be a non-zero power of two. For `n == 1` the trace is empty.
pub fn generate_merge_sort_trace(n: usize) -> Result<Trace, TraceError> {
    if n == 0 || !n.is_power_of_two() || n > u32::MAX as usize {
        return Err(TraceError::InvalidLength(n));
    }
    let mut events = Vec::with_capacity(expected_event_count(n));
    if n >= 2 {
        let half = n / 2;
        sort_range(0, half, Phase::BuildLeft, &mut events);
        sort_range(half, n, Phase::BuildRight, &mut events);
        merge_range(0, n, Phase::FinalMerge, &mut events);
    }
    Ok(Trace {
        list_len: n,
        events,
    })
}

/// Number of events `generate_merge_sort_trace(n)` emits: `2 n log2 n`.
pub fn expected_event_count(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        2 * n * n.trailing_zeros() as usize
    }
}

fn sort_range(lo: usize, hi: usize, phase: Phase, out: &mut Vec<TraceEvent>) {
    if hi - lo < 2 {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    sort_range(lo, mid, phase, out);
    sort_range(mid, hi, phase, out);
    merge_range(lo, hi, phase, out);
}

fn merge_range(lo: usize, hi: usize, phase: Phase, out: &mut Vec<TraceEvent>) {
    let block = |i: usize| TraceEvent::new(i as u32, phase);
    // copy-out reads of both runs
    out.extend((lo..hi).map(block));
    // write-back of the merged output
    out.extend((lo..hi).map(block));
}

pub const TRACE_HEADER_PREFIX: &str = "# merge-sort-trace n=";

/// Writes `trace` in the line-oriented text format.
pub fn write_trace<W: Write>(trace: &Trace, mut sink: W) -> Result<(), TraceError> {
    writeln!(sink, "{}{}", TRACE_HEADER_PREFIX, trace.list_len)?;
    for ev in &trace.events {
        writeln!(sink, "{} {}", ev.block, ev.phase)?;
    }
    sink.flush()?;
    Ok(())
}

/// Parses a trace written by [`write_trace`].
pub fn read_trace<R: BufRead>(source: R) -> Result<Trace, TraceError> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(parse_err(1, "missing header")),
    };
    let list_len = header
        .trim_end()
        .strip_prefix(TRACE_HEADER_PREFIX)
        .and_then(|s| usize::from_str(s).ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| parse_err(1, format!("bad header `{header}`")))?;

    let mut events = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = text.split_whitespace();
        let (block, phase) = match (fields.next(), fields.next(), fields.next()) {
            (Some(b), Some(p), None) => (b, p),
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("expected `<block> <phase>`, got `{text}`"),
                ))
            }
        };
        let block: u32 = block
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid block id `{block}`")))?;
        if block as usize >= list_len {
            return Err(parse_err(
                line_no,
                format!("block {block} out of range for n={list_len}"),
            ));
        }
        let phase = Phase::from_letter(phase)
            .ok_or_else(|| parse_err(line_no, format!("unknown phase `{phase}`")))?;
        events.push(TraceEvent::new(block, phase));
    }
    Ok(Trace { list_len, events })
}

fn parse_err(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Parse {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element_has_no_events() {
        let t = generate_merge_sort_trace(1).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.list_len(), 1);
    }

    #[test]
    fn two_elements_are_one_final_merge() {
        let t = generate_merge_sort_trace(2).unwrap();
        assert!(t.events().iter().all(|e| e.phase == Phase::FinalMerge));
        assert_eq!(t.distinct_blocks(), 2);
        let blocks: Vec<u32> = t.events().iter().map(|e| e.block.0).collect();
        assert_eq!(blocks, vec![0, 1, 0, 1]);
    }

    #[test]
    fn rejects_bad_lengths() {
        for n in [0, 3, 10, 255] {
            assert!(matches!(
                generate_merge_sort_trace(n),
                Err(TraceError::InvalidLength(m)) if m == n
            ));
        }
        let msg = generate_merge_sort_trace(10).unwrap_err().to_string();
        assert!(msg.starts_with("n must be a power of two"));
    }

    #[test]
    fn header_only_for_single_element() {
        let mut buf = Vec::new();
        write_trace(&generate_merge_sort_trace(1).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# merge-sort-trace n=1\n");
    }

    #[test]
    fn event_line_format() {
        let t = Trace::new(8, vec![TraceEvent::new(5, Phase::FinalMerge)]).unwrap();
        let mut buf = Vec::new();
        write_trace(&t, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# merge-sort-trace n=8\n5 M\n"
        );
    }

    #[test]
    fn reads_minimal_trace() {
        let t = read_trace("# merge-sort-trace n=2\n0 M\n1 M\n".as_bytes()).unwrap();
        assert_eq!(t.list_len(), 2);
        assert_eq!(
            t.events(),
            &[
                TraceEvent::new(0, Phase::FinalMerge),
                TraceEvent::new(1, Phase::FinalMerge)
            ]
        );
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        let t = read_trace("# merge-sort-trace n=4\n\n# note\n3 L\n  \n2 R\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("# merge-sort-trace n=2\nx M\n", 2),
            ("# merge-sort-trace n=2\n0 M\n1 Q\n", 3),
            ("# merge-sort-trace n=2\n0 M\n\n2 M\n", 4),
            ("# merge-sort-trace n=2\n0\n", 2),
            ("# merge-sort-trace n=2\n0 M extra\n", 2),
            ("merge-sort n=2\n0 M\n", 1),
            ("# merge-sort-trace n=0\n", 1),
            ("", 1),
        ];
        for (input, want) in cases {
            match read_trace(input.as_bytes()) {
                Err(TraceError::Parse { line, .. }) => assert_eq!(line, want, "{input:?}"),
                other => panic!("{input:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn trace_new_checks_range() {
        assert!(matches!(
            Trace::from_blocks(4, &[0, 4], Phase::BuildLeft),
            Err(TraceError::BlockOutOfRange { .. })
        ));
    }
}
