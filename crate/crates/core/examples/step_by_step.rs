//! Drive a two-level hierarchy one reference at a time and watch blocks move
//! between L1, L2 and memory.
//!
//!     cargo run --example step_by_step

use cachesim::hierarchy::Hierarchy;
use cachesim::{generate_merge_sort_trace, HierarchyConfig, PolicySpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trace = generate_merge_sort_trace(8)?;
    let config = HierarchyConfig::two_level(2, PolicySpec::Lru, 4, PolicySpec::Fifo);
    let mut h = Hierarchy::new(&config, &trace, true)?;

    println!(
        "{:>3} {:>5} {:>5}  {:<12} {:<16}",
        "#", "block", "phase", "l1", "l2"
    );
    for (i, &event) in trace.events().iter().enumerate() {
        h.step(event)?;
        let show = |blocks: Vec<cachesim::BlockId>| {
            blocks
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let l2 = h.l2().map(|l2| show(l2.resident())).unwrap_or_default();
        println!(
            "{i:>3} {:>5} {:>5}  {:<12} {:<16}",
            event.block.to_string(),
            event.phase.letter(),
            show(h.l1().resident()),
            l2
        );
    }
    println!("\n{:#?}", h.stats());
    Ok(())
}
