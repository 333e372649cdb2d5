//! `clurep`: run clustering replicability experiments described by a JSON config.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use clurep_core::{Error, Execution, Result};

use crate::commands::Context;
use crate::config::{Command, ExperimentConfig};
use crate::output::OutputDir;

#[derive(Parser, Debug)]
#[command(name = "clurep", version, about = "Cross-study clustering replicability experiments")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config (a previous run's manifest.json is accepted too).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "clurep-out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, env = "CLUREP_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", &e.to_string(), 2),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = match &e {
                Error::Config(_) | Error::Parse { .. } => ("config", 2),
                Error::Io { .. } => ("io", 1),
                Error::Dimension { .. } => ("dimension", 1),
                Error::EmptyInput(_) => ("empty_input", 1),
                Error::NonFinite { .. } => ("non_finite", 1),
                Error::Undefined(_) => ("undefined", 1),
                Error::PerturbationFailures { .. } => ("perturbation_failures", 1),
            };
            report_error(kind, &e.to_string(), code)
        }
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message.trim_end() } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&cli.config).map_err(|source| Error::Io {
        path: cli.config.clone(),
        source,
    })?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let threads = rayon::current_num_threads();
    let base_dir = cli
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = Context {
        command: cli.command,
        config,
        base_dir,
        execution: Execution::Auto,
    };
    let mut out = OutputDir::create(&cli.out)?;
    log::info!("{} on {threads} thread(s)", cli.command.name());
    commands::run(&ctx, &mut out)?;
    out.finish(cli.command, &ctx.config, threads, started.elapsed())
}
