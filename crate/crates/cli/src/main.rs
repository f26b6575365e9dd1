//! Command-line front end: loads channel fixtures, runs one analysis
//! subcommand, prints the JSON report on stdout (or writes it to a file),
//! and summarizes on stderr when attached to a terminal.
//!
//! Exit codes: 0 success, 2 bad input or violated precondition, 3 numerical
//! failure.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chanspec::error::Error;
use chanspec::fixture::ChannelFixture;
use chanspec::report::{analyze, human_summary, AnalysisCommand, AnalysisOptions, AnalysisReport};

#[derive(Parser)]
#[command(
    name = "chanspec",
    version,
    about = "Spectral analysis of quantum channels through their Kraus algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, clap::Args)]
struct CommonArgs {
    /// Channel fixture files (JSON).
    #[arg(required = true)]
    fixtures: Vec<PathBuf>,

    /// Relative tolerance for rank and kernel decisions.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Peripheral band: eigenvalues with |λ| >= 1 - eps count as peripheral.
    #[arg(long = "peripheral-eps", default_value_t = 1e-6)]
    peripheral_eps: f64,

    /// Seed for every randomized step (generic commutant elements,
    /// invertibility sampling).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Exclude the empty word from the algebra basis.
    #[arg(long = "no-identity")]
    no_identity: bool,

    /// Primitivity search cap (default 2n²).
    #[arg(long)]
    mmax: Option<usize>,

    /// Trajectory length for `simulate`.
    #[arg(long, default_value_t = 200)]
    steps: usize,

    /// Write the report(s) here instead of stdout. With several fixtures
    /// this must be a directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check trace preservation and unitality.
    Validate(CommonArgs),
    /// Superoperator spectrum and peripheral eigenvalues.
    Spectrum(CommonArgs),
    /// Word basis of the Kraus algebra, ★-closure, blocks.
    Algebra(CommonArgs),
    /// Common-eigenvector criteria for the Kraus operators.
    Shemesh(CommonArgs),
    /// Primitivity certificate search over word-span dimensions.
    Primitivity(CommonArgs),
    /// Certified constraints on the peripheral spectrum.
    Predict(CommonArgs),
    /// Iterate the channel and detect asymptotic cycles.
    Simulate(CommonArgs),
    /// Full pipeline: all of the above in one report.
    Report(CommonArgs),
}

impl Command {
    fn split(&self) -> (AnalysisCommand, &CommonArgs) {
        match self {
            Command::Validate(a) => (AnalysisCommand::Validate, a),
            Command::Spectrum(a) => (AnalysisCommand::Spectrum, a),
            Command::Algebra(a) => (AnalysisCommand::Algebra, a),
            Command::Shemesh(a) => (AnalysisCommand::Shemesh, a),
            Command::Primitivity(a) => (AnalysisCommand::Primitivity, a),
            Command::Predict(a) => (AnalysisCommand::Predict, a),
            Command::Simulate(a) => (AnalysisCommand::Simulate, a),
            Command::Report(a) => (AnalysisCommand::Report, a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    match run(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({
                "error": e.to_string(),
                "kind": if e.is_user_error() { "precondition" } else { "numerical" },
            });
            eprintln!("{payload}");
            if e.is_user_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(command: AnalysisCommand, args: &CommonArgs) -> Result<(), Error> {
    let options = AnalysisOptions {
        tol: args.tol,
        peripheral_eps: args.peripheral_eps,
        seed: args.seed,
        no_identity: args.no_identity,
        mmax: args.mmax,
        steps: args.steps,
    };
    if args.fixtures.len() > 1 {
        if let Some(out) = &args.out {
            if !out.is_dir() {
                return Err(Error::Precondition(format!(
                    "--out must name a directory when analyzing several fixtures: {}",
                    out.display()
                )));
            }
        }
    }

    let mut reports = Vec::with_capacity(args.fixtures.len());
    for path in &args.fixtures {
        let fixture = ChannelFixture::load(path)?;
        let report = analyze(command, &fixture, &options)?;
        if std::io::stderr().is_terminal() {
            eprintln!("{}", human_summary(&report));
        }
        reports.push((path.clone(), report));
    }

    match &args.out {
        None => {
            if reports.len() == 1 {
                println!("{}", reports[0].1.to_json_pretty());
            } else {
                let all: Vec<&AnalysisReport> = reports.iter().map(|(_, r)| r).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&all).expect("serializes")
                );
            }
        }
        Some(out) => {
            if reports.len() == 1 && !out.is_dir() {
                write_atomically(out, &reports[0].1)?;
            } else {
                for (path, report) in &reports {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().to_string())
                        .unwrap_or_else(|| "report".to_string());
                    let target = out.join(format!("{stem}.report.json"));
                    write_atomically(&target, report)?;
                }
            }
        }
    }
    Ok(())
}

/// Writes via a temporary sibling and renames, so readers never observe a
/// half-written report.
fn write_atomically(path: &Path, report: &AnalysisReport) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, report.to_json_pretty() + "\n")?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
