//! `statdec`: generate decoding instances, harvest parity checks, decode,
//! and reproduce the exponent curves.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{usage, CliResult};

#[derive(Debug, Parser)]
#[command(name = "statdec", version, about = "Statistical decoding of random binary linear codes")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags every command accepts.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (all cores when absent).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Configuration file of `key=value` lines; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random decoding instance.
    Gen(commands::gen::GenArgs),
    /// Collect parity-check equations for an instance's code.
    Harvest(commands::harvest::HarvestArgs),
    /// Union of pool files for the same code.
    Merge(commands::harvest::MergeArgs),
    /// Decode an instance with a pool.
    Decode(commands::decode::DecodeArgs),
    /// Exact biases for one (n, w, t), or a bias table.
    Bias(commands::bias::BiasArgs),
    /// Exponent curves as CSV.
    Exponent(commands::exponent::ExponentArgs),
    /// Run the identity and soundness suites, or check files.
    Verify(commands::verify::VerifyArgs),
    /// Run seeded decoding trials and write a JSON report.
    Campaign(commands::campaign::CampaignArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(usage)?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Gen(a) => commands::gen::run(g, a),
        Command::Harvest(a) => commands::harvest::run(g, a),
        Command::Merge(a) => commands::harvest::run_merge(g, a),
        Command::Decode(a) => commands::decode::run(g, a),
        Command::Bias(a) => commands::bias::run(g, a),
        Command::Exponent(a) => commands::exponent::run(g, a),
        Command::Verify(a) => commands::verify::run(g, a),
        Command::Campaign(a) => commands::campaign::run(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("statdec: {e}");
            e.exit_code()
        }
    }
}
