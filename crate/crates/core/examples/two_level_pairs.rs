//! Exclusive two-level hierarchy: every L1/L2 policy pair at L1 = 8 across L2
//! sizes, plus a single validated run with the full counter breakdown.
//!
//!     cargo run --release --example two_level_pairs

use cachesim::{
    generate_merge_sort_trace, render, run_sweep, simulate_with, Format, HierarchyConfig,
    PolicySpec, SimOptions, SweepSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = run_sweep(&SweepSpec::default_pairs())?;
    println!("global miss rate excluding compulsory misses (%), n = 256, L1 = 8\n");
    print!("{}", render(&table, Format::Markdown));

    let trace = generate_merge_sort_trace(256)?;
    let config = HierarchyConfig::two_level(8, PolicySpec::pbr(), 176, PolicySpec::Fifo);
    let stats = simulate_with(&trace, &config, SimOptions::validating())?;
    println!("\npbr/fifo at L2 = 176, validated per event:\n{stats:#?}");
    let report = stats.report();
    println!(
        "global miss rate: {:.2}% raw, {:.2}% excluding compulsory",
        report.global.raw * 100.0,
        report.global.nocomp * 100.0
    );
    Ok(())
}
