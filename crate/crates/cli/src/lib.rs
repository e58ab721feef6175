//! Command-line front end: `analyze` runs the deciders on a group
//! expression, `oracle` runs finite-group experiments, `crosscheck` drives
//! the oracle's consistency checks on random instances.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse error, 3 order bound
//! exceeded, 4 invariant violation.

mod analyze;
mod crosscheck;
mod oracle;
mod table;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::time::Instant;

use clap::{Parser, Subcommand};
use pipoor_core::finite::OracleError;
use pipoor_core::DeciderError;
use serde::Serialize;
use serde_json::Value;

pub use crosscheck::{crosscheck, CrosscheckOptions};
pub use table::{Cell, Table};

pub const TOOL: &str = "pipoor";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever the JSON report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE_ERROR: i32 = 2;
    pub const BOUND_EXCEEDED: i32 = 3;
    pub const INVARIANT_VIOLATION: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Bound(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE_ERROR,
            CliError::Bound(_) => exit::BOUND_EXCEEDED,
            CliError::Invariant(_) => exit::INVARIANT_VIOLATION,
            CliError::Other(_) => exit::FAILURE,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BoundExceeded { .. } => CliError::Bound(e.to_string()),
            OracleError::Syntax { .. } | OracleError::NotPrimePower(_) | OracleError::InfiniteFactor => {
                CliError::Parse(e.to_string())
            }
            OracleError::RouteDisagreement { .. } => CliError::Invariant(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<DeciderError> for CliError {
    fn from(e: DeciderError) -> Self {
        match e {
            DeciderError::InconsistentCorollary(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pipoor", version, about = "Decide poorness and pure-splitness of abelian groups")]
pub struct Cli {
    /// Print the JSON report envelope instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Print tables as CSV (oracle and crosscheck)
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Add wall-clock timing to JSON output
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the structural predicates and deciders on a group expression
    Analyze {
        /// Expression such as "sum{p}[Z(p^1)] + Q", or "-" to read stdin
        expr: String,
        /// List the p-local structure for every prime up to this bound
        #[arg(long, default_value_t = 7)]
        max_prime: u64,
    },
    /// Exhaustive experiments on finite abelian groups
    Oracle {
        #[command(subcommand)]
        command: oracle::OracleCommand,
    },
    /// Check oracle invariants on seeded random instances
    Crosscheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 128)]
        bound: u64,
        /// Flip the SNF extension verdict (harness self-test)
        #[arg(long, hide = true)]
        corrupt_oracle: bool,
    },
}

/// The result of one command, before formatting.
pub(crate) struct Outcome {
    pub command: String,
    pub input: String,
    pub report: Value,
    pub text: String,
    pub table: Option<Table>,
    pub exit: i32,
}

#[derive(Serialize)]
pub struct ReportEnvelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub command: &'a str,
    pub input: &'a str,
    pub report: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze { expr, max_prime } => {
            let text = if expr == "-" {
                let mut s = String::new();
                stdin
                    .read_to_string(&mut s)
                    .map_err(|e| CliError::Other(format!("reading stdin: {e}")))?;
                s.trim().to_string()
            } else {
                expr.clone()
            };
            analyze::run(&text, *max_prime)
        }
        Command::Oracle { command } => oracle::run(command),
        Command::Crosscheck {
            seed,
            count,
            bound,
            corrupt_oracle,
        } => crosscheck::run(&CrosscheckOptions {
            seed: *seed,
            count: *count,
            bound: *bound,
            corrupt_oracle: *corrupt_oracle,
        }),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE_ERROR } else { exit::OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let start = Instant::now();
    let outcome = match dispatch(&cli, stdin) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let written = if cli.json {
        let envelope = ReportEnvelope {
            tool: TOOL,
            version: VERSION,
            schema_version: SCHEMA_VERSION,
            command: &outcome.command,
            input: &outcome.input,
            report: &outcome.report,
            timing_ms: cli.timing.then_some(elapsed),
        };
        let json = serde_json::to_string_pretty(&envelope).expect("serializable report");
        writeln!(out, "{json}")
    } else if cli.csv {
        match &outcome.table {
            Some(t) => out.write_all(t.to_csv().as_bytes()),
            None => out.write_all(outcome.text.as_bytes()),
        }
    } else {
        out.write_all(outcome.text.as_bytes())
    };
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return outcome.exit;
        }
        let _ = writeln!(err, "error: writing output: {e}");
        return exit::FAILURE;
    }
    outcome.exit
}
