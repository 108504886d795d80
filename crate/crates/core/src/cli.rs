//! Command-line front end. The `cachesim` binary is a thin wrapper over [`run`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    self, default_list_pairs, pair_columns, run_sweep, Column, ExperimentError, Format, SweepKind,
    SweepSpec,
};
use crate::hierarchy::{
    percent, simulate_with, HierarchyConfig, Metric, SimError, SimOptions, SimStats,
};
use crate::policy::PolicySpec;
use crate::trace::{generate_merge_sort_trace, read_trace, write_trace, Trace, TraceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "cachesim",
    version,
    about = "Cache replacement simulator for merge-sort traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the merge-sort reference trace for a list of length n.
    GenTrace {
        #[arg(long)]
        n: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one trace against one cache configuration.
    Simulate(SimulateArgs),
    /// Miss rate against L1 size, single level.
    SweepL1(SweepL1Args),
    /// Miss rate of L1/L2 policy pairs against L2 size.
    SweepPairs(SweepPairsArgs),
    /// Miss rate against list length at fixed L1 and L2 sizes.
    SweepList(SweepListArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["trace", "n"]))]
struct SimulateArgs {
    /// Trace file written by gen-trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Generate the trace for a list of this length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l1: usize,
    #[arg(long = "policy-l1", value_parser = parse_policy)]
    policy_l1: PolicySpec,
    #[arg(long, requires = "policy_l2")]
    l2: Option<usize>,
    #[arg(long = "policy-l2", value_parser = parse_policy, requires = "l2")]
    policy_l2: Option<PolicySpec>,
    #[arg(long, default_value = "raw", value_parser = parse_metric)]
    metric: Metric,
    /// Check exclusivity and counter identities after every event.
    #[arg(long)]
    validate: bool,
    /// Measure a second pass over the trace.
    #[arg(long)]
    warmup: bool,
}

#[derive(Debug, Args)]
struct SweepCommon {
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    #[arg(long, default_value = "nocomp", value_parser = parse_metric)]
    metric: Metric,
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    warmup: bool,
}

#[derive(Debug, Args)]
struct SweepL1Args {
    #[arg(long, default_value_t = experiment::DEFAULT_LIST_LEN)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "lru,fifo,lfu,pbr", value_parser = parse_policy)]
    policies: Vec<PolicySpec>,
    #[arg(long, default_value = "8,16,32,64,128,256", value_parser = parse_axis)]
    sizes: AxisArg,
    #[command(flatten)]
    common: SweepCommon,
}

#[derive(Debug, Args)]
struct SweepPairsArgs {
    #[arg(long, default_value_t = experiment::DEFAULT_LIST_LEN)]
    n: usize,
    #[arg(long, default_value_t = experiment::DEFAULT_PAIR_L1)]
    l1: usize,
    #[arg(long = "l1-policies", value_delimiter = ',', default_value = "lru,fifo,pbr", value_parser = parse_policy)]
    l1_policies: Vec<PolicySpec>,
    #[arg(long = "l2-policies", value_delimiter = ',', default_value = "lru,fifo,lfu", value_parser = parse_policy)]
    l2_policies: Vec<PolicySpec>,
    #[arg(long = "l2-sizes", default_value = "16,56,96,136,176,216,256", value_parser = parse_axis)]
    l2_sizes: AxisArg,
    #[command(flatten)]
    common: SweepCommon,
}

#[derive(Debug, Args)]
struct SweepListArgs {
    #[arg(long, default_value_t = experiment::DEFAULT_LIST_L1)]
    l1: usize,
    #[arg(long, default_value_t = experiment::DEFAULT_LIST_L2)]
    l2: usize,
    #[arg(long, default_value = "8..1024x2", value_parser = parse_axis)]
    lengths: AxisArg,
    /// Policies simulated at L1 alone.
    #[arg(long, value_delimiter = ',', default_value = "lru,fifo,lfu,pbr", value_parser = parse_policy)]
    policies: Vec<PolicySpec>,
    /// L1/L2 pairs, e.g. pbr/fifo. Replaces the default pair set.
    #[arg(long = "pair", value_delimiter = ',', value_parser = parse_column)]
    pairs: Vec<Column>,
    #[command(flatten)]
    common: SweepCommon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AxisArg(Vec<usize>);

fn parse_policy(s: &str) -> Result<PolicySpec, String> {
    s.parse()
        .map_err(|e: crate::policy::PolicyError| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_column(s: &str) -> Result<Column, String> {
    match s.parse::<Column>() {
        Ok(c @ Column::Pair(..)) => Ok(c),
        Ok(_) => Err(format!("`{s}` is not an <l1>/<l2> pair")),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `a,b,c` or the geometric range `a..bxk`.
fn parse_axis(s: &str) -> Result<AxisArg, String> {
    parse_axis_values(s).map(AxisArg)
}

pub fn parse_axis_values(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if let Some((start, rest)) = s.split_once("..") {
        let (end, factor) = rest
            .split_once('x')
            .ok_or_else(|| format!("range `{s}` needs a factor, e.g. 8..1024x2"))?;
        let num = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid number `{v}` in `{s}`"))
        };
        let (start, end, factor) = (num(start)?, num(end)?, num(factor)?);
        if start == 0 || factor < 2 || start > end {
            return Err(format!(
                "range `{s}` needs 0 < start <= end and factor >= 2"
            ));
        }
        let mut values = Vec::new();
        let mut v = start;
        while v <= end {
            values.push(v);
            v = match v.checked_mul(factor) {
                Some(next) => next,
                None => break,
            };
        }
        return Ok(values);
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid number `{v}` in `{s}`"))
        })
        .collect()
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Invariant { .. } => CliError::Invariant(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Trace(t) => t.into(),
            ExperimentError::Cell {
                source: SimError::Invariant { .. },
                ..
            } => CliError::Invariant(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::GenTrace { n, out } => {
            let trace = generate_merge_sort_trace(n)?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    write_trace(&trace, BufWriter::new(file))?;
                }
                None => write_trace(&trace, &mut *stdout)?,
            }
            Ok(())
        }
        Command::Simulate(args) => simulate_cmd(args, stdout),
        Command::SweepL1(args) => {
            let columns = args.policies.into_iter().map(Column::Single).collect();
            let spec = SweepSpec::new(
                SweepKind::L1Sizes { list_len: args.n },
                args.sizes.0,
                columns,
            );
            sweep_cmd(spec, &args.common, stdout)
        }
        Command::SweepPairs(args) => {
            let spec = SweepSpec::new(
                SweepKind::L2Sizes {
                    list_len: args.n,
                    l1_capacity: args.l1,
                },
                args.l2_sizes.0,
                pair_columns(&args.l1_policies, &args.l2_policies),
            );
            sweep_cmd(spec, &args.common, stdout)
        }
        Command::SweepList(args) => {
            let mut columns: Vec<Column> = args.policies.into_iter().map(Column::Single).collect();
            if args.pairs.is_empty() {
                columns.extend(default_list_pairs());
            } else {
                columns.extend(args.pairs);
            }
            let spec = SweepSpec::new(
                SweepKind::ListLengths {
                    l1_capacity: args.l1,
                    l2_capacity: args.l2,
                },
                args.lengths.0,
                columns,
            );
            sweep_cmd(spec, &args.common, stdout)
        }
    }
}

fn simulate_cmd(args: SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let trace: Trace = match (&args.trace, args.n) {
        (Some(path), _) => {
            let file =
                File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            read_trace(BufReader::new(file))?
        }
        (None, Some(n)) => generate_merge_sort_trace(n)?,
        (None, None) => return Err(CliError::Usage("one of --trace or --n is required".into())),
    };
    let config = match (args.l2, args.policy_l2) {
        (Some(cap), Some(policy)) => {
            HierarchyConfig::two_level(args.l1, args.policy_l1, cap, policy)
        }
        _ => HierarchyConfig::single(args.l1, args.policy_l1),
    };
    let options = SimOptions {
        validate: args.validate,
        warmup: args.warmup,
    };
    let stats = simulate_with(&trace, &config, options)?;
    write_stats(stdout, &trace, &config, &stats, args.metric)?;
    Ok(())
}

fn write_stats(
    out: &mut dyn Write,
    trace: &Trace,
    config: &HierarchyConfig,
    stats: &SimStats,
    metric: Metric,
) -> io::Result<()> {
    writeln!(out, "list_len: {}", trace.list_len())?;
    writeln!(out, "l1: {} {}", config.l1.capacity, config.l1.policy)?;
    if let Some(l2) = &config.l2 {
        writeln!(out, "l2: {} {}", l2.capacity, l2.policy)?;
    }
    let counters = [
        ("refs", stats.refs),
        ("l1_hits", stats.l1_hits),
        ("l1_misses", stats.l1_misses),
        ("l2_accesses", stats.l2_accesses),
        ("l2_hits", stats.l2_hits),
        ("l2_misses", stats.l2_misses),
        ("memory_fetches", stats.memory_fetches),
        ("compulsory_misses", stats.compulsory_misses),
        ("demotions_to_l2", stats.demotions_to_l2),
        ("l2_evictions_to_memory", stats.l2_evictions_to_memory),
    ];
    for (name, value) in counters {
        writeln!(out, "{name}: {value}")?;
    }
    let report = stats.report();
    writeln!(out, "metric: {metric}")?;
    writeln!(out, "l1_miss_rate: {}", percent(report.l1.get(metric)))?;
    writeln!(
        out,
        "l2_local_miss_rate: {}",
        percent(report.l2_local.get(metric))
    )?;
    writeln!(
        out,
        "global_miss_rate: {}",
        percent(report.global.get(metric))
    )?;
    Ok(())
}

fn sweep_cmd(
    mut spec: SweepSpec,
    common: &SweepCommon,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    spec.metric = common.metric;
    spec.options = SimOptions {
        validate: common.validate,
        warmup: common.warmup,
    };
    let table = run_sweep(&spec)?;
    stdout.write_all(experiment::render(&table, common.format).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_syntax() {
        assert_eq!(
            parse_axis_values("8..1024x2").unwrap(),
            vec![8, 16, 32, 64, 128, 256, 512, 1024]
        );
        assert_eq!(parse_axis_values("16, 56,96").unwrap(), vec![16, 56, 96]);
        assert_eq!(parse_axis_values("3..30x3").unwrap(), vec![3, 9, 27]);
        for bad in ["", "8..", "8..64", "0..8x2", "8..4x2", "8..64x1", "a,b"] {
            assert!(parse_axis_values(bad).is_err(), "{bad}");
        }
    }
}
