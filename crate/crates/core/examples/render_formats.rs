//! One small sweep rendered in each output format: CSV, markdown and a
//! whitespace-separated table for plotting tools.
//!
//!     cargo run --example render_formats

use cachesim::{render, run_sweep, Column, Format, Metric, PolicySpec, SweepKind, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = SweepSpec::new(
        SweepKind::L1Sizes { list_len: 64 },
        vec![4, 8, 16, 32],
        vec![
            Column::Single(PolicySpec::Lru),
            Column::Single(PolicySpec::Fifo),
        ],
    );
    for metric in [Metric::NoComp, Metric::Raw] {
        spec.metric = metric;
        let table = run_sweep(&spec)?;
        for format in [Format::Csv, Format::Markdown, Format::Gnuplot] {
            println!("--- {metric}, {format:?}");
            print!("{}", render(&table, format));
        }
    }
    Ok(())
}
