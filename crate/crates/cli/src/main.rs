//! `med`: minimum energy designs from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 runtime or protocol error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod io;
mod settings;

use clap::{Parser, Subcommand};

use commands::{bench, diagnose, followup, generate};

#[derive(Debug, Parser)]
#[command(name = "med", version, about = "Minimum energy designs for expensive unnormalized densities")]
struct Cli {
    /// Cap on concurrent external density workers.
    #[arg(long, global = true, env = "MED_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a design; writes design.csv, ledger.csv, report.json, manifest.json.
    Generate(generate::GenerateArgs),
    /// Diagnostics of a point file.
    Diagnose(diagnose::DiagnoseArgs),
    /// Surrogate-based Metropolis follow-up of a finished run.
    Followup(followup::FollowupArgs),
    /// Matched-budget comparison against baseline samplers.
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.threads == Some(0) {
        eprintln!("error: threads: must be at least 1");
        std::process::exit(2);
    }
    let result = match cli.command {
        Command::Generate(a) => generate::run(a, cli.threads),
        Command::Diagnose(a) => diagnose::run(a),
        Command::Followup(a) => followup::run(a),
        Command::Bench(a) => bench::run(a),
    };
    if let Err(e) = result {
        let kind = if e.exit_code() == 2 { "usage error" } else { "error" };
        eprintln!("{kind}: {e}");
        std::process::exit(e.exit_code());
    }
}
