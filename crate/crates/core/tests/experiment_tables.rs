use cachesim::experiment::{improvement_band, ExperimentError, DEFAULT_L1_SIZES};
use cachesim::{
    generate_merge_sort_trace, render, run_sweep, simulate, Column, Format, HierarchyConfig,
    Metric, PolicySpec, SweepKind, SweepSpec,
};

fn small_l1_sweep() -> SweepSpec {
    SweepSpec::new(
        SweepKind::L1Sizes { list_len: 64 },
        vec![4, 8, 16, 32, 64],
        ["lru", "fifo", "lfu", "pbr"]
            .iter()
            .map(|c| c.parse().unwrap())
            .collect(),
    )
}

/// Parse a rendered table back into (axis, values) rows.
fn parse_rows(text: &str, format: Format) -> Vec<(usize, Vec<f64>)> {
    let lines = text.lines();
    let (skip, split): (usize, fn(&str) -> Vec<String>) = match format {
        Format::Csv => (1, |l| l.split(',').map(str::to_owned).collect()),
        Format::Markdown => (2, |l| {
            l.trim_matches('|')
                .split('|')
                .map(|c| c.trim().to_owned())
                .collect()
        }),
        Format::Gnuplot => (1, |l| l.split_whitespace().map(str::to_owned).collect()),
    };
    lines
        .skip(skip)
        .map(|l| {
            let cells = split(l);
            let vals = cells[1..].iter().map(|c| c.parse().unwrap()).collect();
            (cells[0].parse().unwrap(), vals)
        })
        .collect()
}

#[test]
fn cells_match_direct_simulation() {
    let spec = small_l1_sweep();
    let table = run_sweep(&spec).unwrap();
    let trace = generate_merge_sort_trace(64).unwrap();
    for (a, &size) in spec.axis.iter().enumerate() {
        for (c, col) in spec.columns.iter().enumerate() {
            let Column::Single(p) = *col else {
                unreachable!()
            };
            let s = simulate(&trace, &HierarchyConfig::single(size, p)).unwrap();
            assert_eq!(
                table.rate(a, c),
                s.report().global.nocomp,
                "{col} at {size}"
            );
        }
    }

    let pairs = SweepSpec::new(
        SweepKind::L2Sizes {
            list_len: 64,
            l1_capacity: 4,
        },
        vec![4, 12, 40],
        vec!["pbr/fifo".parse().unwrap(), "lru/lfu".parse().unwrap()],
    );
    let table = run_sweep(&pairs).unwrap();
    for (a, &l2) in pairs.axis.iter().enumerate() {
        for (c, col) in pairs.columns.iter().enumerate() {
            let Column::Pair(p1, p2) = *col else {
                unreachable!()
            };
            let s = simulate(&trace, &HierarchyConfig::two_level(4, p1, l2, p2)).unwrap();
            assert_eq!(table.report(a, c), &s.report());
        }
    }
}

#[test]
fn list_sweep_uses_one_trace_per_length() {
    let spec = SweepSpec::new(
        SweepKind::ListLengths {
            l1_capacity: 4,
            l2_capacity: 8,
        },
        vec![4, 8, 16, 32],
        vec!["fifo".parse().unwrap(), "fifo/fifo".parse().unwrap()],
    );
    let table = run_sweep(&spec).unwrap();
    for (a, &n) in spec.axis.iter().enumerate() {
        let trace = generate_merge_sort_trace(n).unwrap();
        let one = simulate(&trace, &HierarchyConfig::single(4, PolicySpec::Fifo)).unwrap();
        let two = simulate(
            &trace,
            &HierarchyConfig::two_level(4, PolicySpec::Fifo, 8, PolicySpec::Fifo),
        )
        .unwrap();
        assert_eq!(table.rate(a, 0), one.report().global.nocomp);
        assert_eq!(table.rate(a, 1), two.report().global.nocomp);
    }
}

#[test]
fn lru_column_is_non_increasing() {
    let table = run_sweep(&small_l1_sweep()).unwrap();
    let lru = table
        .column_rates(&Column::Single(PolicySpec::Lru))
        .unwrap();
    assert!(lru.windows(2).all(|w| w[1] <= w[0]), "{lru:?}");
    // every policy is down to compulsory misses once the whole list fits
    let last = table.axis().len() - 1;
    assert_eq!(table.rate(last, 0), 0.0);
}

#[test]
fn fifo_at_128_renders_twelve_and_a_half() {
    let spec = SweepSpec::new(
        SweepKind::L1Sizes { list_len: 256 },
        vec![128],
        vec![Column::Single(PolicySpec::Fifo)],
    );
    let table = run_sweep(&spec).unwrap();
    assert_eq!(render(&table, Format::Csv), "axis,fifo\n128,12.50\n");
    assert_eq!(
        render(&table, Format::Markdown),
        "| axis | fifo |\n|---:|---:|\n| 128 | 12.50 |\n"
    );
}

#[test]
fn rendering_is_reproducible() {
    let spec = small_l1_sweep();
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    for f in [Format::Csv, Format::Markdown, Format::Gnuplot] {
        assert_eq!(render(&a, f), render(&b, f));
    }
}

#[test]
fn formats_agree_numerically() {
    let mut spec = SweepSpec::default_pairs();
    spec.kind = SweepKind::L2Sizes {
        list_len: 64,
        l1_capacity: 8,
    };
    spec.axis = vec![16, 32, 64];
    let table = run_sweep(&spec).unwrap();
    let csv = parse_rows(&render(&table, Format::Csv), Format::Csv);
    assert_eq!(csv.len(), 3);
    assert_eq!(
        csv,
        parse_rows(&render(&table, Format::Markdown), Format::Markdown)
    );
    assert_eq!(
        csv,
        parse_rows(&render(&table, Format::Gnuplot), Format::Gnuplot)
    );
    for (a, (axis, vals)) in csv.iter().enumerate() {
        assert_eq!(*axis, spec.axis[a]);
        for (c, v) in vals.iter().enumerate() {
            assert!((v - table.rate(a, c) * 100.0).abs() <= 0.005 + 1e-9);
        }
    }
    let header = render(&table, Format::Csv)
        .lines()
        .next()
        .unwrap()
        .to_owned();
    assert!(header.starts_with("axis,lru/lru,lru/fifo,lru/lfu,fifo/lru"));
}

#[test]
fn raw_metric_counts_compulsory_misses() {
    let mut spec = small_l1_sweep();
    spec.metric = Metric::Raw;
    let raw = run_sweep(&spec).unwrap();
    let nocomp = run_sweep(&small_l1_sweep()).unwrap();
    for a in 0..spec.axis.len() {
        for c in 0..spec.columns.len() {
            assert!(raw.rate(a, c) >= nocomp.rate(a, c));
        }
    }
    // 64 compulsory misses out of 768 references
    let last = spec.axis.len() - 1;
    assert!((raw.rate(last, 0) - 64.0 / 768.0).abs() < 1e-12);
}

#[test]
fn improvement_band_skips_zero_baselines() {
    let table = run_sweep(&small_l1_sweep()).unwrap();
    let lru = Column::Single(PolicySpec::Lru);
    let lfu = Column::Single(PolicySpec::Lfu);
    let (lo, hi) = improvement_band(&table, &lru, &lfu).unwrap();
    assert!(lo <= hi);
    assert!(hi <= 100.0);
    assert_eq!(improvement_band(&table, &lru, &lru), Some((0.0, 0.0)));
}

#[test]
fn invalid_specs_are_reported() {
    let mut spec = small_l1_sweep();
    spec.axis = vec![];
    assert!(matches!(run_sweep(&spec), Err(ExperimentError::EmptyAxis)));
    let mut spec = small_l1_sweep();
    spec.axis = vec![8, 4];
    assert!(run_sweep(&spec).is_err());
    let mut spec = SweepSpec::default_l1();
    spec.columns = vec!["fifo/fifo".parse().unwrap()];
    assert!(run_sweep(&spec).is_err());
    let mut spec = SweepSpec::default_l1();
    spec.kind = SweepKind::L1Sizes { list_len: 100 };
    assert!(run_sweep(&spec).is_err());
    assert_eq!(SweepSpec::default_l1().axis, DEFAULT_L1_SIZES.to_vec());
}
