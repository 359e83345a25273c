//! Command-line front end for `skewcomp`.
//!
//! [`run`] parses arguments, dispatches one subcommand and returns the
//! process exit code: 0 on success, 1 on invalid input, 2 when an
//! internal check fails.

mod output;
mod parse;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use skewcomp::experiment::{
    bounds_experiment, compensation_experiment, default_algorithms, default_bound_configs, generate_samples,
    Algorithm, SAMPLING_DESCRIPTION,
};
use skewcomp::{
    candidate_interval, compensate, interval_deltas, oracle_nearest, reference_interval, BoundMethod, Precision,
    Rational,
};

pub use output::{format_avg, OutputFormat, TABLE2_HEADER, TABLE3_HEADER};
use output::{render_table2, render_table3, Metadata};
use parse::{parse_count, parse_decimal, parse_positive};

pub const THREADS_ENV: &str = "SKEWCOMP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "skewcomp", version, about = "Integer clock skew compensation with floating-point error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Candidate interval for one clock value, with the exact reference and deltas
    Bounds(PointArgs),
    /// Skew-compensated clock for one hardware clock value
    Compensate {
        #[command(flatten)]
        point: PointArgs,
        /// Exit with status 2 if the candidate interval missed the result
        #[arg(long)]
        strict: bool,
    },
    /// Bound deltas against the exact reference over random skews
    Table2(TableArgs),
    /// Compensation error and iteration counts over random skews
    Table3 {
        #[command(flatten)]
        table: TableArgs,
        /// Exit with status 2 if any sample raised a bounds violation
        #[arg(long)]
        strict: bool,
    },
    /// Seeded invariant checks
    Selftest {
        #[arg(long, default_value = "2000", value_parser = parse_positive)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Hardware clock value (integer, `1e9` shorthand allowed)
    #[arg(long, value_parser = parse_count)]
    i: u64,
    #[arg(long = "D", value_parser = parse_positive)]
    d: u64,
    #[arg(long = "A", value_parser = parse_positive)]
    a: u64,
    #[arg(long, default_value = "practical", value_parser = parse_method)]
    method: BoundMethod,
    #[arg(long, default_value = "binary32", value_parser = parse_precision)]
    precision: Precision,
    /// ε = eps_coeff·i for the approximate method
    #[arg(long, default_value = "1e-7", value_parser = parse_decimal)]
    eps_coeff: Rational,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value = "100000", value_parser = parse_positive)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated hardware clock values
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_values = ["1e6", "1e7", "1e8", "1e9"])]
    i: Vec<u64>,
    #[arg(long = "D", default_value = "1000000", value_parser = parse_positive)]
    d: u64,
    /// Skew is uniform in [-range, range] ppm
    #[arg(long, default_value = "100", value_parser = parse_decimal)]
    range_ppm: Rational,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    method: Vec<BoundMethod>,
    #[arg(long, value_delimiter = ',', value_parser = parse_precision)]
    precision: Vec<Precision>,
    #[arg(long, default_value = "1e-7", value_parser = parse_decimal)]
    eps_coeff: Rational,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<BoundMethod, String> {
    s.parse().map_err(|_| {
        let known: Vec<_> = BoundMethod::ALL.iter().map(|m| m.as_str()).collect();
        format!("unknown method '{s}' (expected one of {})", known.join(", "))
    })
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|_| {
        let known: Vec<_> = Precision::ALL.iter().map(|p| p.as_str()).collect();
        format!("unknown precision '{s}' (expected one of {})", known.join(", "))
    })
}

enum Failure {
    Invalid(String),
    Check(String),
}

impl From<skewcomp::Error> for Failure {
    fn from(e: skewcomp::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

/// Runs one command line. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = configure_threads().and_then(|()| dispatch(cli.command, out));
    match result {
        Ok(()) => 0,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            2
        }
    }
}

fn configure_threads() -> CmdResult {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Bounds(p) => cmd_bounds(&p, out),
        Command::Compensate { point, strict } => cmd_compensate(&point, strict, out),
        Command::Table2(t) => cmd_table2(&t, out),
        Command::Table3 { table, strict } => cmd_table3(&table, strict, out),
        Command::Selftest { samples, seed } => cmd_selftest(seed, samples as usize, out),
    }
}

fn check_skew(d: u64, a: u64) -> CmdResult {
    if d / 2 >= a {
        return Err(Failure::Invalid(format!("need D < 2A, got D={d} A={a}")));
    }
    Ok(())
}

fn cmd_bounds(p: &PointArgs, out: &mut dyn Write) -> CmdResult {
    check_skew(p.d, p.a)?;
    let head = format!("method={} precision={}", p.method, p.precision);
    if p.d == p.a {
        let i = p.i;
        writeln!(out, "{head} case=identity lb={i} ub={i} ref_lb={i} ref_ub={i} dlb=0 dub=0")?;
        return Ok(());
    }
    let (delta_b, offset, case) = if p.d < p.a {
        (p.d, 0, "case1")
    } else {
        (p.d - p.a, p.i as i64, "case2")
    };
    let cand = candidate_interval(p.i, delta_b, p.a, p.method, p.precision, &p.eps_coeff)?;
    let reference = reference_interval(p.i, delta_b, p.a, p.precision.format())?;
    let (dlb, dub) = interval_deltas(&cand, &reference);
    writeln!(
        out,
        "{head} case={case} lb={} ub={} ref_lb={} ref_ub={} dlb={dlb} dub={dub}",
        cand.lb + offset,
        cand.ub + offset,
        reference.lb + offset,
        reference.ub + offset,
    )?;
    Ok(())
}

fn cmd_compensate(p: &PointArgs, strict: bool, out: &mut dyn Write) -> CmdResult {
    check_skew(p.d, p.a)?;
    let res = compensate(p.i, p.d, p.a, p.method, p.precision, &p.eps_coeff)?;
    let oracle = oracle_nearest(p.i, p.d, p.a)?;
    let err = oracle as i128 - res.j as i128;
    let case = match res.case {
        skewcomp::CompCase::Identity => "identity",
        skewcomp::CompCase::Case1 => "case1",
        skewcomp::CompCase::Case2 => "case2",
    };
    writeln!(
        out,
        "j={} iterations={} oracle={oracle} err={err} case={case} bounds_violated={}",
        res.j, res.iterations, res.bounds_violated
    )?;
    if strict && res.bounds_violated {
        return Err(Failure::Check(format!(
            "{} bounds in {} excluded the compensated clock",
            p.method, p.precision
        )));
    }
    Ok(())
}

fn base_metadata(command: &'static str, t: &TableArgs) -> Metadata {
    vec![
        ("command", command.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("seed", t.seed.to_string()),
        ("samples", t.samples.to_string()),
        ("D", t.d.to_string()),
        ("range_ppm", t.range_ppm.to_string()),
        ("distribution", SAMPLING_DESCRIPTION.to_string()),
        ("eps_coeff", t.eps_coeff.to_string()),
    ]
}

fn emit(t: &TableArgs, text: &str, out: &mut dyn Write) -> CmdResult {
    match &t.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn or_all<T: Copy>(chosen: &[T], all: &[T]) -> Vec<T> {
    if chosen.is_empty() {
        all.to_vec()
    } else {
        chosen.to_vec()
    }
}

fn cmd_table2(t: &TableArgs, out: &mut dyn Write) -> CmdResult {
    let configs = if t.method.is_empty() && t.precision.is_empty() {
        default_bound_configs()
    } else {
        let methods = or_all(&t.method, &BoundMethod::ALL);
        let precisions = or_all(&t.precision, &Precision::ALL);
        methods
            .iter()
            .flat_map(|&m| precisions.iter().map(move |&p| (m, p)))
            .collect()
    };
    let samples = generate_samples(t.seed, t.samples as usize, t.d, &t.range_ppm)?;
    let rows = bounds_experiment(&samples, &t.i, &configs, &t.eps_coeff)?;
    let mut meta = base_metadata("table2", t);
    let identity = rows.first().map_or(0, |r| r.identity_samples);
    meta.push(("identity_samples_skipped", identity.to_string()));
    meta.push(("reference", "exact rational interval with the optimal coefficients of each precision".into()));
    meta.push(("sign_convention", "dlb = ref_lb - lb; dub = ub - ref_ub; negative means a violation".into()));
    emit(t, &render_table2(&meta, &rows, t.format), out)
}

fn cmd_table3(t: &TableArgs, strict: bool, out: &mut dyn Write) -> CmdResult {
    let algorithms = if t.method.is_empty() && t.precision.is_empty() {
        default_algorithms()
    } else {
        let methods = or_all(&t.method, &[BoundMethod::Practical, BoundMethod::Approximate]);
        let precisions = or_all(&t.precision, &[Precision::Binary32]);
        precisions
            .iter()
            .flat_map(|&p| {
                std::iter::once(Algorithm::Naive(p)).chain(methods.iter().map(move |&m| Algorithm::Compensated(m, p)))
            })
            .collect()
    };
    let samples = generate_samples(t.seed, t.samples as usize, t.d, &t.range_ppm)?;
    let rows = compensation_experiment(&samples, &t.i, &algorithms, &t.eps_coeff)?;
    let mut meta = base_metadata("table3", t);
    meta.push(("sign_convention", "err = floor(t_hat_binary64) - j".into()));
    emit(t, &render_table3(&meta, &rows, t.format), out)?;
    let violations: u64 = rows.iter().map(|r| r.violations).sum();
    if strict && violations > 0 {
        return Err(Failure::Check(format!("{violations} bounds violations")));
    }
    Ok(())
}

fn cmd_selftest(seed: u64, trials: usize, out: &mut dyn Write) -> CmdResult {
    let mut failed = 0;
    for check in selftest::run_all(seed, trials) {
        match &check.outcome {
            Ok(detail) => writeln!(out, "ok   {}: {detail}", check.name)?,
            Err(msg) => {
                failed += 1;
                writeln!(out, "FAIL {}: {msg}", check.name)?;
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} selftest checks failed")));
    }
    Ok(())
}
