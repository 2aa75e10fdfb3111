//! Scenario-driven CLI: `run` a single configuration, `sweep` a Monte
//! Carlo grid, or print sensing `diagnostics`. Exit codes: 0 success,
//! 2 config error, 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use interfero::experiments::{
    diagnostics_report, emit_outputs, monte_carlo_sweep, run_scenario, Scenario, ScenarioConfig,
};
use interfero::solvers::SolverStatus;
use interfero::Error;

#[derive(Parser)]
#[command(
    name = "interfero",
    about = "Compressive interferometry scenario harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute one scenario config end-to-end.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write SVG plots.
        #[arg(long)]
        plots: bool,
    },
    /// Run the Monte Carlo (M, SNR) grid of a scenario config.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        plots: bool,
    },
    /// Print a sensing diagnostic report.
    Diagnostics {
        /// Which diagnostic: isotropy | incoherence | concentration | rip.
        #[arg(long)]
        what: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        plots: bool,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io { .. } => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    out: &Option<PathBuf>,
) -> Result<(ScenarioConfig, PathBuf), Error> {
    let mut cfg = ScenarioConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out_dir = out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out_dir))
}

fn execute(cmd: Cmd) -> Result<(), (u8, String)> {
    match cmd {
        Cmd::Run {
            config,
            out,
            seed,
            plots,
        } => run_or_sweep(config, out, seed, plots, false),
        Cmd::Sweep {
            config,
            out,
            seed,
            plots,
        } => run_or_sweep(config, out, seed, plots, true),
        Cmd::Diagnostics {
            what,
            out,
            seed,
            plots: _,
        } => {
            let report = diagnostics_report(&what, seed.unwrap_or(0))
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            print!("{report}");
            if let Some(dir) = out {
                let path = dir.join(format!("diagnostics_{what}.csv"));
                std::fs::create_dir_all(&dir)
                    .and_then(|_| std::fs::write(&path, &report))
                    .map_err(|e| (EXIT_CONFIG, format!("i/o error at {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn run_or_sweep(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    plots: bool,
    sweep: bool,
) -> Result<(), (u8, String)> {
    let (cfg, out_dir) =
        load_config(&config, seed, &out).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    if cfg.scenario == Scenario::Diagnostics {
        for what in ["isotropy", "incoherence", "concentration", "rip"] {
            let report = diagnostics_report(what, cfg.seed)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let path = out_dir.join(format!("diagnostics_{what}.csv"));
            std::fs::create_dir_all(&out_dir)
                .and_then(|_| std::fs::write(&path, &report))
                .map_err(|e| (EXIT_CONFIG, format!("i/o error at {}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        return Ok(());
    }
    let (table, artifacts) = if sweep {
        monte_carlo_sweep(&cfg)
    } else {
        run_scenario(&cfg)
    }
    .map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let files = emit_outputs(&table, &artifacts, &cfg, &out_dir, plots)
        .map_err(|e| (exit_code_for(&e), e.to_string()))?;
    for f in &files {
        println!("wrote {f}");
    }
    let failed = table
        .rows
        .iter()
        .filter(|r| r.status != SolverStatus::Converged)
        .count();
    if failed > 0 {
        return Err((
            EXIT_SOLVER,
            format!("{failed} of {} cells did not converge", table.rows.len()),
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
