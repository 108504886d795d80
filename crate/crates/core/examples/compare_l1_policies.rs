//! Single-level comparison of LRU, FIFO, LFU and PBR across L1 sizes on a
//! 256-element sort, plus the relative improvement of each policy over FIFO.
//!
//!     cargo run --release --example compare_l1_policies

use cachesim::experiment::improvement_band;
use cachesim::{render, run_sweep, Column, Format, PolicySpec, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SweepSpec::default_l1();
    let table = run_sweep(&spec)?;
    println!("miss rate excluding compulsory misses (%), n = 256\n");
    print!("{}", render(&table, Format::Markdown));

    let fifo = Column::Single(PolicySpec::Fifo);
    println!();
    for column in table.columns().iter().filter(|c| **c != fifo) {
        match improvement_band(&table, column, &fifo) {
            Some((lo, hi)) => println!("{column} vs fifo: {lo:+.1}% .. {hi:+.1}%"),
            None => println!("{column} vs fifo: undefined (fifo rate is zero everywhere)"),
        }
    }
    Ok(())
}
