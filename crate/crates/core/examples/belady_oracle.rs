//! The offline optimum as a lower bound: FIFO's anomaly on the classic
//! sequence, then every online policy against OPT on a real merge-sort trace.
//!
//!     cargo run --release --example belady_oracle

use cachesim::{generate_merge_sort_trace, simulate, HierarchyConfig, Phase, PolicySpec, Trace};

fn misses(trace: &Trace, capacity: usize, policy: PolicySpec) -> u64 {
    simulate(trace, &HierarchyConfig::single(capacity, policy))
        .expect("valid configuration")
        .l1_misses
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classic = Trace::from_blocks(6, &[1, 2, 3, 4, 1, 2, 5, 1, 2, 3, 4, 5], Phase::FinalMerge)?;
    println!("1,2,3,4,1,2,5,1,2,3,4,5");
    for cap in 1..=5 {
        println!(
            "  capacity {cap}: fifo {:>2}  lru {:>2}  opt {:>2}",
            misses(&classic, cap, PolicySpec::Fifo),
            misses(&classic, cap, PolicySpec::Lru),
            misses(&classic, cap, PolicySpec::Opt),
        );
    }

    let trace = generate_merge_sort_trace(128)?;
    println!("\nmerge sort, n = 128 ({} references)", trace.len());
    let policies = [
        PolicySpec::Lru,
        PolicySpec::Fifo,
        PolicySpec::Lfu,
        PolicySpec::pbr(),
        PolicySpec::Opt,
    ];
    print!("{:>8}", "capacity");
    for p in policies {
        print!("{:>7}", p.to_string());
    }
    println!();
    for cap in [4, 8, 16, 32, 64] {
        print!("{cap:>8}");
        for p in policies {
            print!("{:>7}", misses(&trace, cap, p));
        }
        println!();
    }
    Ok(())
}
