//! `runorder`: sort, score and model run-length-encoded tables.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 budget refusal.

mod args;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use runorder_core::Error;

use commands::{BoundArgs, ExperimentArgs, GenArgs, ModelArgs, OracleArgs, SortArgs};

#[derive(Debug, Parser)]
#[command(name = "runorder", version, about = "Row and column reordering for run-length-encoded tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sort a table and report its runs.
    Sort(SortArgs),
    /// Bounds on the run count of recursive orders relative to the optimum.
    Bound(BoundArgs),
    /// Expected runs of a uniform random table, or the ordering inequality check.
    Model(ModelArgs),
    /// Exact minimum run count of a small table.
    Oracle(OracleArgs),
    /// Mean runs per row order over synthetic tables.
    Experiment(ExperimentArgs),
    /// Write a synthetic table as delimited text.
    Gen(GenArgs),
}

/// Bad flag combination or parameter value.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(Error::InvalidParameter(_) | Error::InvalidPermutation(_) | Error::LengthMismatch { .. }) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Sort(a) => commands::sort(&a)?.write(a.format, None),
        Command::Bound(a) => commands::bound(&a)?.write(a.output.format, a.output.out.as_deref()),
        Command::Model(a) => commands::model(&a)?.write(a.output.format, a.output.out.as_deref()),
        Command::Oracle(a) => commands::oracle(&a)?.write(a.output.format, a.output.out.as_deref()),
        Command::Experiment(a) => commands::experiment(&a)?.write(a.output.format, a.output.out.as_deref()),
        Command::Gen(a) => commands::gen(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
