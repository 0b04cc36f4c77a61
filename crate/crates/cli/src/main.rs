//! `dampwave`: experiments for the damped semilinear wave equation on compact groups.
//!
//! Exit codes: 0 success, 1 a tolerance check failed, 2 configuration error,
//! 3 resource limit. Every flag can also be set through the environment
//! variable named in `--help` (prefix `DWAVE_`).

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dampwave::Error;

use crate::commands::{key_values, Report};
use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "dampwave", version, about = "Spectral experiments for u_tt - Lu + u_t = |u|^p on T^n and SU(2)")]
struct Cli {
    /// TOML configuration file; missing keys take their documented defaults.
    #[arg(long, global = true, env = "DWAVE_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "DWAVE_OUT", default_value = "out")]
    out: PathBuf,
    /// Base seed for random data and checks.
    #[arg(long, global = true, env = "DWAVE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "DWAVE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Round-trip, Plancherel, unitarity and Schur checks of the group transforms.
    TransformCheck,
    /// Norms of the linear solution and fitted decay constants.
    LinearDecay,
    /// One run of the semilinear solver.
    Solve,
    /// Lifespan against epsilon, with a log-log slope fit.
    LifespanSweep,
    /// Blow-up sequences and constants, optionally checked against a trajectory.
    Bounds,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::TransformCheck => "transform-check",
            Command::LinearDecay => "linear-decay",
            Command::Solve => "solve",
            Command::LifespanSweep => "lifespan-sweep",
            Command::Bounds => "bounds",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidSpec(_) | Error::OutOfRange(_) | Error::Mismatch(_) | Error::Empty(_) => 2,
        Error::GridTooLarge { .. } | Error::TooManySteps { .. } => 3,
        Error::Inconsistent(_) => 1,
    }
}

/// The config table relevant to `command`, echoed into the manifest.
fn section(cfg: &Config, command: Command) -> String {
    let text = match command {
        Command::TransformCheck => toml::to_string(&cfg.transform_check),
        Command::LinearDecay => toml::to_string(&cfg.linear_decay),
        Command::Solve => toml::to_string(&cfg.solve),
        Command::LifespanSweep => toml::to_string(&cfg.lifespan_sweep),
        Command::Bounds => toml::to_string(&cfg.bounds),
    };
    text.unwrap_or_else(|e| format!("# unprintable: {e}\n"))
}

fn write_outputs(dir: &Path, cli: &Cli, cfg: &Config, report: &Report, elapsed: f64) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for (name, body) in &report.files {
        std::fs::write(dir.join(name), body)?;
        outputs.push(name.clone());
    }
    std::fs::write(dir.join("summary.txt"), key_values(&report.summary))?;
    outputs.push("summary.txt".into());
    let mut manifest = String::new();
    manifest.push_str(&format!("command = {}\n", cli.command.name()));
    manifest.push_str(&format!("seed = {}\n", cli.seed));
    manifest.push_str(&format!("threads = {}\n", rayon::current_num_threads()));
    manifest.push_str(&format!("wall_time_seconds = {elapsed:.3}\n"));
    manifest.push_str(&format!("status = {}\n", if report.failures.is_empty() { "ok" } else { "tolerance-failure" }));
    manifest.push_str(&format!("outputs = {}\n", outputs.join(",")));
    manifest.push_str("\n[config]\n");
    manifest.push_str(&section(cfg, cli.command));
    std::fs::write(dir.join("manifest.txt"), manifest)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cfg = Config::load(cli.config.as_deref())?;
    let started = Instant::now();
    let report = match cli.command {
        Command::TransformCheck => commands::transform_check(&cfg.transform_check, cli.seed),
        Command::LinearDecay => commands::linear_decay(&cfg.linear_decay, cli.seed),
        Command::Solve => commands::solve(&cfg.solve, cli.seed),
        Command::LifespanSweep => commands::lifespan_sweep_cmd(&cfg.lifespan_sweep, cli.seed),
        Command::Bounds => commands::bounds(&cfg.bounds),
    }?;
    write_outputs(&cli.out, cli, &cfg, &report, started.elapsed().as_secs_f64())
        .map_err(|e| Error::Config(format!("cannot write to {}: {e}", cli.out.display())))?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(report) => {
            print!("{}", key_values(&report.summary));
            if report.failures.is_empty() {
                println!("status = ok");
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    println!("FAIL: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
