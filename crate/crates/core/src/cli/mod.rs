//! Command-line experiment runner.
//!
//! ```text
//! d2dcache coverage   [--config P] [--seed N] [--trials N] [--out P] [--weight-mode paper|exact] [--emit-plot]
//! d2dcache hitcurve   ...
//! d2dcache maxhit     ...
//! d2dcache throughput ...
//! d2dcache selftest   [--seed N] [--trials N] [--out P]
//! ```
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid input.

pub mod commands;
pub mod output;
pub mod selftest;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::interference::WeightMode;
use selftest::{Fault, SelftestOptions};
use spec::{Experiment, ExperimentSpec, Overrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "d2dcache",
    version,
    about = "Coverage, hit probability and cache placement in finite D2D networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability versus SIR threshold for selected serving ranks.
    Coverage(CommonArgs),
    /// Total hit probability versus b1 for a two-content library.
    Hitcurve(CommonArgs),
    /// Optimal placement and maximum hit probability versus active devices.
    Maxhit(CommonArgs),
    /// Throughput N_a·P*_hit versus active devices.
    Throughput(CommonArgs),
    /// Runs the built-in invariant suite at reduced trial counts.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML experiment config; missing keys take the figure defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo trials per row (0 disables simulation).
    #[arg(long, value_name = "N")]
    pub trials: Option<u64>,
    /// Output CSV; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "MODE", value_parser = parse_weight_mode)]
    pub weight_mode: Option<WeightMode>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    pub emit_plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    #[arg(long, value_name = "U64", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_name = "N", default_value_t = 20_000)]
    pub trials: u64,
    /// Write the report here as well as to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true, value_name = "FAULT")]
    pub inject_fault: Option<Fault>,
}

fn parse_weight_mode(s: &str) -> Result<WeightMode, String> {
    s.parse::<WeightMode>().map_err(|e| e.to_string())
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Dimension { .. } => CliError::invalid(e.to_string()),
            Error::Quadrature { .. } | Error::NotConverged { .. } => {
                CliError::internal(e.to_string())
            }
        }
    }
}

impl From<spec::SpecError> for CliError {
    fn from(e: spec::SpecError) -> Self {
        CliError::invalid(e.0)
    }
}

/// Resolves the spec and computes the CSV text without touching the disk.
pub fn render_experiment(
    experiment: Experiment,
    args: &CommonArgs,
) -> Result<(ExperimentSpec, String), CliError> {
    let overrides = Overrides {
        seed: args.seed,
        trials: args.trials,
        weight_mode: args.weight_mode,
        output: args.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
    };
    let spec = ExperimentSpec::resolve_file(experiment, args.config.as_deref(), &overrides)?;
    let table = commands::run(experiment, &spec)?;
    let csv = output::render_csv(experiment, &spec, &table);
    Ok((spec, csv))
}

fn run_experiment(
    experiment: Experiment,
    args: &CommonArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (spec, csv) = render_experiment(experiment, args)?;
    match spec.run.output.as_deref().map(PathBuf::from) {
        Some(path) => {
            output::write_atomic(&path, &csv)
                .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
            if args.emit_plot {
                let script_path = output::plot_script_path(&path);
                let script = output::plot_script(experiment, &spec, &path);
                if let Err(e) = output::write_atomic(&script_path, &script) {
                    let _ = std::fs::remove_file(&path);
                    return Err(CliError::internal(format!(
                        "cannot write {}: {e}",
                        script_path.display()
                    )));
                }
            }
        }
        None => {
            if args.emit_plot {
                return Err(CliError::invalid(
                    "--emit-plot needs an output path (--out or [run] output)",
                ));
            }
            stdout
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::internal(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn run_selftest(args: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = selftest::run(&SelftestOptions {
        seed: args.seed,
        trials: args.trials,
        fault: args.inject_fault,
    });
    let text = report.render();
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::internal(format!("cannot write to stdout: {e}")))?;
    if let Some(path) = &args.out {
        output::write_atomic(path, &text)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::internal("selftest failed"))
    }
}

/// Runs a parsed command, writing data to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Coverage(a) => run_experiment(Experiment::Coverage, a, stdout),
        Command::Hitcurve(a) => run_experiment(Experiment::HitCurve, a, stdout),
        Command::Maxhit(a) => run_experiment(Experiment::MaxHit, a, stdout),
        Command::Throughput(a) => run_experiment(Experiment::Throughput, a, stdout),
        Command::Selftest(a) => run_selftest(a, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("d2dcache: {}", e.message);
            e.code
        }
    }
}
