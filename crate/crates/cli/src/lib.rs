//! Command-line front end: measures for state files, verification suites,
//! geometry experiments, parameter sweeps and state sampling.
//!
//! Exit codes: 0 success, 1 invalid input, 2 failed checks, 3 I/O error.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod suites;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{Check, SampleKind, SweepFamily};
use crate::error::{CliError, CliResult};
use crate::suites::{Suite, SuiteConfig, DEFAULT_BAND_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "nonclassical",
    version,
    about = "Non-classical correlation measures from local unitary perturbations"
)]
pub struct Cli {
    /// Base seed; case i uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the suite tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format (sweep defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `sample`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the wall time to standard error.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GD, MIN and GMIN of a state file.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "d")]
        d: Option<usize>,
    },
    /// Run a verification suite over sampled states.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        states: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// No-circle or band experiments on random generic two-qubit states.
    Geometry {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = nonclassical::geometry::DEFAULT_PLANES)]
        planes: usize,
        #[arg(long, default_value_t = DEFAULT_BAND_BUDGET)]
        budget: usize,
    },
    /// Evaluate the measures of a one-parameter family on a uniform grid.
    Sweep {
        #[arg(long, value_enum)]
        family: SweepFamily,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Write sampled states as JSON files into the `--out` directory.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        #[arg(long)]
        count: usize,
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = std::time::Instant::now();
    let timing = cli.timing;
    let result = execute(cli);
    if timing {
        eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    let format = cli.format.unwrap_or(Format::Json);
    match cli.command {
        Command::Measure { input, d } => emit(out, &commands::measure(&input, d, format)?),
        Command::Verify {
            suite,
            states,
            budget,
        } => {
            let cfg = SuiteConfig {
                states,
                budget,
                seed: cli.seed,
                tol: cli.tol,
            };
            let (text, failed, total) = commands::verify(suite, cfg, format)?;
            emit(out, &text)?;
            checks(failed, total)
        }
        Command::Geometry {
            check,
            states,
            planes,
            budget,
        } => {
            let (text, failed, total) =
                commands::geometry(check, states, planes, budget, cli.seed, format)?;
            emit(out, &text)?;
            checks(failed, total)
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
        } => emit(
            out,
            &commands::sweep(family, from, to, steps, cli.format.unwrap_or(Format::Csv))?,
        ),
        Command::Sample { kind, count, d } => {
            let dir = out.ok_or_else(|| CliError::Usage("sample requires --out <dir>".into()))?;
            commands::sample(kind, count, d, cli.seed, dir).map(|_| ())
        }
    }
}

fn checks(failed: usize, total: usize) -> CliResult<()> {
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::ChecksFailed { failed, total })
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
