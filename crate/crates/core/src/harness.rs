//! Command-line orchestration.
//!
//! Exit codes: 0 success, 1 hypothesis or integrality failure, 2 oracle
//! failure, 3 I/O, parse or checkpoint error, 4 invalid configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use crate::engine::{compute_rectangle, CoeffTable};
use crate::error::{Error, Result};
use crate::oracle::run_oracle_suite;
use crate::tables::{emit_table, OutputFormat, TableMode};
use crate::valuation::{is_prime, verify_range};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationMismatch = 1,
    OracleFailure = 2,
    IoError = 3,
    InvalidConfig = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn for_error(e: &Error) -> Self {
        match e {
            Error::DivisibilityViolation { .. } | Error::IntegralityViolation { .. } => {
                Self::VerificationMismatch
            }
            Error::Config(_) | Error::NotPrime(_) => Self::InvalidConfig,
            Error::InsufficientPrecision(_) | Error::Series(_) => Self::OracleFailure,
            Error::Io(_)
            | Error::Parse { .. }
            | Error::Version(_)
            | Error::CheckpointMismatch { .. }
            | Error::NotComputed { .. }
            | Error::ZeroValuation => Self::IoError,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Compute,
    Verify,
    Tables,
    OracleCheck,
    Report,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub max_i: u32,
    pub max_j: u32,
    pub primes: Vec<u64>,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
    pub mode: TableMode,
    pub output_format: OutputFormat,
    pub oracle_order: i64,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            max_i: 20,
            max_j: 20,
            primes: vec![2, 3, 5],
            workers: default_workers(),
            checkpoint_path: None,
            json_path: None,
            mode: TableMode::Nu,
            output_format: OutputFormat::Plain,
            oracle_order: 30,
        }
    }

    /// Parses command-line arguments (including the program name).
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Cli::try_parse_from(args).map(Cli::into_config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        if self.oracle_order < 3 {
            return Err(Error::Config("oracle order must be at least 3".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "sigma-coeffs", version, about = "Weierstrass sigma coefficients and their 2-/3-adic valuations")]
struct Cli {
    /// Worker threads per weight diagonal.
    #[arg(long, global = true, env = "SIGMA_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Compute a[i,j] over a rectangle and write a checkpoint (resumes from it if it exists).
    Compute {
        #[arg(long)]
        max_i: u32,
        #[arg(long)]
        max_j: u32,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check the 2-adic and 3-adic valuation hypothesis over a rectangle.
    Verify {
        #[arg(long)]
        max_i: u32,
        #[arg(long)]
        max_j: u32,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Render a valuation matrix (rows j, columns i).
    Tables {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_i: u32,
        #[arg(long)]
        max_j: u32,
        #[arg(long, default_value = "nu")]
        mode: TableMode,
        #[arg(long, default_value = "plain")]
        format: OutputFormat,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run the series oracles at the given precision.
    OracleCheck {
        #[arg(long, default_value_t = 30)]
        order: i64,
    },
    /// Human-readable summary of verification, tables and oracles.
    Report {
        #[arg(long, default_value_t = 20)]
        max_i: u32,
        #[arg(long, default_value_t = 20)]
        max_j: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 30)]
        order: i64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let workers = self.workers.unwrap_or_else(default_workers);
        let mut c = match self.command {
            CliCommand::Compute {
                max_i,
                max_j,
                checkpoint,
            } => RunConfig {
                max_i,
                max_j,
                checkpoint_path: checkpoint,
                ..RunConfig::new(Command::Compute)
            },
            CliCommand::Verify {
                max_i,
                max_j,
                checkpoint,
                json,
            } => RunConfig {
                max_i,
                max_j,
                checkpoint_path: checkpoint,
                json_path: json,
                output_format: OutputFormat::Json,
                ..RunConfig::new(Command::Verify)
            },
            CliCommand::Tables {
                prime,
                max_i,
                max_j,
                mode,
                format,
                checkpoint,
            } => RunConfig {
                max_i,
                max_j,
                primes: vec![prime],
                mode,
                output_format: format,
                checkpoint_path: checkpoint,
                ..RunConfig::new(Command::Tables)
            },
            CliCommand::OracleCheck { order } => RunConfig {
                oracle_order: order,
                ..RunConfig::new(Command::OracleCheck)
            },
            CliCommand::Report {
                max_i,
                max_j,
                primes,
                order,
                checkpoint,
            } => RunConfig {
                max_i,
                max_j,
                primes,
                oracle_order: order,
                checkpoint_path: checkpoint,
                ..RunConfig::new(Command::Report)
            },
        };
        c.workers = workers;
        c
    }
}

/// Executes `config`, writing human output to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> ExitStatus {
    match execute(config, out) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::for_error(&e)
        }
    }
}

/// Table for the configured rectangle; an existing checkpoint is validated
/// and resumed from.
fn obtain_table(config: &RunConfig) -> Result<CoeffTable> {
    let resume = match &config.checkpoint_path {
        Some(path) if path.exists() => Some(load_checkpoint(path)?),
        Some(path) if config.command != Command::Compute => {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("checkpoint {} not found", path.display()),
            )))
        }
        _ => None,
    };
    compute_rectangle(config.max_i, config.max_j, config.workers, resume.as_ref())
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus> {
    config.validate()?;
    match config.command {
        Command::Compute => {
            let started = Instant::now();
            let table = obtain_table(config)?;
            match &config.checkpoint_path {
                Some(path) => {
                    save_checkpoint(&table, path)?;
                    writeln!(
                        out,
                        "computed {} coefficients (weight <= {}) in {:.3}s -> {}",
                        table.closure_len(),
                        table.weight_bound(),
                        started.elapsed().as_secs_f64(),
                        path.display()
                    )?;
                }
                None => Checkpoint::from_table(&table).write_to(&mut *out)?,
            }
            Ok(ExitStatus::Success)
        }
        Command::Verify => {
            let table = obtain_table(config)?;
            let summary = verify_range(&table, config.max_i, config.max_j)?;
            let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
            match &config.json_path {
                Some(path) => {
                    fs::write(path, format!("{json}\n"))?;
                    writeln!(
                        out,
                        "{}/{} indices match; report written to {}",
                        summary.matches,
                        summary.total,
                        path.display()
                    )?;
                }
                None => writeln!(out, "{json}")?,
            }
            Ok(if summary.all_match() {
                ExitStatus::Success
            } else {
                ExitStatus::VerificationMismatch
            })
        }
        Command::Tables => {
            let table = obtain_table(config)?;
            for &p in &config.primes {
                let text = emit_table(
                    &table,
                    p,
                    config.max_i,
                    config.max_j,
                    config.mode,
                    config.output_format,
                )?;
                out.write_all(text.as_bytes())?;
            }
            Ok(ExitStatus::Success)
        }
        Command::OracleCheck => {
            let report = run_oracle_suite(config.oracle_order, config.workers)?;
            if config.output_format == OutputFormat::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            } else {
                for check in &report.checks {
                    let tag = if check.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{tag} {} (order {})", check.name, report.order)?;
                }
            }
            Ok(if report.passed() {
                ExitStatus::Success
            } else {
                ExitStatus::OracleFailure
            })
        }
        Command::Report => report(config, out),
    }
}

fn report(config: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus> {
    let table = obtain_table(config)?;
    let summary = verify_range(&table, config.max_i, config.max_j)?;
    let oracles = run_oracle_suite(config.oracle_order, config.workers)?;

    writeln!(out, "# sigma-coeffs report")?;
    writeln!(out)?;
    writeln!(
        out,
        "rectangle 0 <= i <= {}, 0 <= j <= {} (closure weight <= {}, {} coefficients)",
        config.max_i,
        config.max_j,
        table.weight_bound(),
        table.closure_len()
    )?;
    writeln!(
        out,
        "valuation hypothesis: {}/{} match, {} mismatches",
        summary.matches,
        summary.total,
        summary.mismatches.len()
    )?;
    for m in summary.mismatches.iter().take(20) {
        writeln!(
            out,
            "  ({}, {}) {:?}: nu2 {:?} vs {}, nu3 {:?} vs {}",
            m.i, m.j, m.status, m.nu2_actual, m.nu2_predicted, m.nu3_actual, m.nu3_predicted
        )?;
    }
    writeln!(out)?;
    for check in &oracles.checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        writeln!(out, "oracle {tag} {} (order {})", check.name, oracles.order)?;
    }
    for &p in &config.primes {
        writeln!(out)?;
        writeln!(out, "nu_{p}(a[i,j]), rows j, columns i:")?;
        let text = emit_table(&table, p, config.max_i, config.max_j, TableMode::Nu, OutputFormat::Plain)?;
        out.write_all(text.as_bytes())?;
    }
    Ok(if !summary.all_match() {
        ExitStatus::VerificationMismatch
    } else if !oracles.passed() {
        ExitStatus::OracleFailure
    } else {
        ExitStatus::Success
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::from_args(std::iter::once("sigma-coeffs").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_subcommands() {
        let c = parse(&["compute", "--max-i", "3", "--max-j", "4", "--workers", "2"]);
        assert_eq!((c.command, c.max_i, c.max_j, c.workers), (Command::Compute, 3, 4, 2));

        let c = parse(&["tables", "--prime", "3", "--max-i", "20", "--max-j", "10", "--mode", "nu-minus-j"]);
        assert_eq!(c.primes, vec![3]);
        assert_eq!(c.mode, TableMode::NuMinusJ);
        assert_eq!(c.output_format, OutputFormat::Plain);

        let c = parse(&["oracle-check"]);
        assert_eq!(c.oracle_order, 30);

        let c = parse(&["report", "--primes", "2,7"]);
        assert_eq!(c.primes, vec![2, 7]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(RunConfig::from_args(["sigma-coeffs", "tables", "--prime", "2"]).is_err());
        assert!(RunConfig::from_args(["sigma-coeffs", "tables", "--prime", "2", "--max-i", "1", "--max-j", "1", "--format", "xml"]).is_err());
    }

    #[test]
    fn invalid_config_exit_code() {
        let mut c = RunConfig::new(Command::Verify);
        c.workers = 0;
        assert_eq!(run(&c, &mut Vec::new()), ExitStatus::InvalidConfig);
        let mut c = RunConfig::new(Command::Tables);
        c.primes = vec![4];
        assert_eq!(run(&c, &mut Vec::new()), ExitStatus::InvalidConfig);
    }

    #[test]
    fn compute_to_stdout() {
        let mut c = RunConfig::new(Command::Compute);
        c.max_i = 1;
        c.max_j = 0;
        let mut out = Vec::new();
        assert_eq!(run(&c, &mut out), ExitStatus::Success);
        assert_eq!(String::from_utf8(out).unwrap(), "sigma-coeffs-v1 1 0\n0\t0\t1\n1\t0\t-1\n");
    }
}
