//! Generate the merge-sort reference trace for a small list and show its
//! structure: length, phase breakdown and the text format.
//!
//!     cargo run --example generate_trace -- 16

use cachesim::trace::{expected_event_count, write_trace};
use cachesim::{generate_merge_sort_trace, Phase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(16), |s| s.parse())?;
    let trace = generate_merge_sort_trace(n)?;

    println!(
        "n = {n}: {} references over {} blocks",
        trace.len(),
        trace.distinct_blocks()
    );
    println!("expected 2 * n * log2(n) = {}", expected_event_count(n));
    for phase in Phase::ALL {
        let count = trace.events().iter().filter(|e| e.phase == phase).count();
        println!("  {:?} ({}): {count}", phase, phase.letter());
    }

    let mut text = Vec::new();
    write_trace(&trace, &mut text)?;
    let text = String::from_utf8(text)?;
    println!("\nfirst lines of the trace file:");
    for line in text.lines().take(9) {
        println!("  {line}");
    }
    Ok(())
}
