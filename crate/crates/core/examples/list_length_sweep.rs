//! Fixed L1 = 32 and L2 = 128 while the sorted list grows from 8 to 1024
//! elements, single-level columns next to two-level pairs.
//!
//!     cargo run --release --example list_length_sweep

use cachesim::{render, run_sweep, Format, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = run_sweep(&SweepSpec::default_list())?;
    println!("global miss rate excluding compulsory misses (%), L1 = 32, L2 = 128\n");
    print!("{}", render(&table, Format::Markdown));
    Ok(())
}
