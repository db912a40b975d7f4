//! `ising-discrim`: distinguishability of transverse-field Ising chains from
//! the command line.

mod output;
mod quantity;
mod scan;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ising_discrim::{Backend, Beta};

use output::{emit, render, Format};
use quantity::{evaluate, BackendArg, Point, Quantity};
use scan::{LockH, Sweep};
use verify::Suite;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 2.
    Usage(String),
    /// A computation or output failure; exit code 1.
    Compute(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl From<ising_discrim::Error> for CliError {
    fn from(e: ising_discrim::Error) -> Self {
        use ising_discrim::Error::*;
        match e {
            InvalidParameter(_) | SizeOutOfRange { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "ising-discrim", version, about = "Quantum discrimination of transverse-field Ising chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum (Helstrom) error probability for telling J1 from J2.
    Pe(PointArgs),
    /// Quantum Chernoff bound between J1 and J2, with the optimal s.
    Qcb(PointArgs),
    /// QCB metric at J, split into classical and nonclassical parts.
    Metric(PointArgs),
    /// Ground-state overlap between J1 and J2.
    Overlap(PointArgs),
    /// Field minimizing the error for J1 vs J2, or maximizing the metric at J.
    OptimalField(PointArgs),
    /// Evaluate a quantity along a parameter sweep.
    Scan(ScanArgs),
    /// Run a verification suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Coupling for single-coupling quantities.
    #[arg(long = "J")]
    j: Option<f64>,
    #[arg(long = "J1")]
    j1: Option<f64>,
    #[arg(long = "J2")]
    j2: Option<f64>,
    /// Transverse field.
    #[arg(long = "h", allow_negative_numbers = true)]
    h: Option<f64>,
    /// Chain length.
    #[arg(long = "L", default_value_t = 2)]
    size: usize,
    /// Inverse temperature, a positive number or `inf` for ground states.
    #[arg(long, default_value = "inf")]
    beta: Beta,
    /// Number of copies for the error probability.
    #[arg(long = "n", default_value_t = 1)]
    copies: usize,
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,
}

impl ModelArgs {
    fn point(&self) -> Result<Point, CliError> {
        if self.copies == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        Ok(Point {
            j: self.j,
            j1: self.j1,
            j2: self.j2,
            h: self.h,
            size: self.size,
            beta: self.beta,
            copies: self.copies,
            backend: self.backend.into(),
        })
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// `param:from:to:steps:lin|log` with param one of J, J1, J2, h, L, beta.
    #[arg(long)]
    sweep: Sweep,
    #[arg(long = "lock-h", value_enum, default_value = "none")]
    lock_h: LockH,
    /// Worker threads; rows are identical for any count.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn point_command(q: Quantity, args: &PointArgs) -> Result<(), CliError> {
    let record = evaluate(q, &args.model.point()?)?;
    let format = args.output.format.unwrap_or(Format::Json);
    emit(&render(&[record], format, Some(&format!("ising-discrim {}", q.name()))), args.output.out.as_deref())
}

fn scan_command(args: &ScanArgs) -> Result<(), CliError> {
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let base = args.model.point()?;
    let rows = scan::run(args.quantity, &args.sweep, args.lock_h, &base, args.threads)?;
    let m = &args.model;
    let fixed = |name: &str, v: Option<f64>| v.map(|x| format!(" {name}={x}")).unwrap_or_default();
    let comment = format!(
        "ising-discrim {} scan quantity={} sweep={} lock-h={}{}{}{}{} L={} beta={} n={} backend={}",
        env!("CARGO_PKG_VERSION"),
        args.quantity.name(),
        args.sweep,
        args.lock_h.name(),
        fixed("J", m.j),
        fixed("J1", m.j1),
        fixed("J2", m.j2),
        fixed("h", m.h),
        m.size,
        m.beta,
        m.copies,
        Backend::from(m.backend).name(),
    );
    let format = args.output.format.unwrap_or(Format::Csv);
    emit(&render(&rows, format, Some(&comment)), args.output.out.as_deref())
}

/// Returns whether every check passed.
fn verify_command(args: &VerifyArgs) -> Result<bool, CliError> {
    let checks = verify::run(args.suite, args.seed)?;
    let passed = checks.iter().filter(|c| c.pass).count();
    let all = passed == checks.len();
    let comment = format!(
        "suite {} seed {}: {} ({passed}/{} checks)",
        args.suite.name(),
        args.seed,
        if all { "PASS" } else { "FAIL" },
        checks.len()
    );
    let records: Vec<_> = checks.iter().map(|c| c.record()).collect();
    let format = args.output.format.unwrap_or(Format::Csv);
    emit(&render(&records, format, Some(&comment)), args.output.out.as_deref())?;
    Ok(all)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Pe(a) => point_command(Quantity::Pe, a),
        Command::Qcb(a) => point_command(Quantity::Qcb, a),
        Command::Metric(a) => point_command(Quantity::Metric, a),
        Command::Overlap(a) => point_command(Quantity::Overlap, a),
        Command::OptimalField(a) => point_command(Quantity::OptimalField, a),
        Command::Scan(a) => scan_command(a),
        Command::Verify(a) => return verify_command(a),
    }?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Compute(_) => 1,
            })
        }
    }
}
