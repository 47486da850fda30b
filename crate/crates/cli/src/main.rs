//! `picard`: batch front end for the picard-core numerics.
//!
//! Exit status: 0 success, 1 usage or other errors, 2 invalid point,
//! 3 truncation failure, 4 vanishing kernel diagonal, 5 sandwich violated.

mod commands;
mod config;
mod fd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "picard", version, about = "Complex-hyperbolic Bergman kernel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// JSON document with the same keys as the flags; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let mut flags = cli.flags;
    flags.command = cli.command;
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.overridden_by(&flags).resolved()?;
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    eprintln!("# threads={}", pool.current_num_threads());
    let docs = pool.install(|| commands::run(&cfg))?;
    output::emit(cfg.out.as_deref(), docs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err.downcast_ref::<commands::Exit>().map_or(1, |e| e.code);
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
