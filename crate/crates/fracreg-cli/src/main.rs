//! Batch front end: config parsing, experiment orchestration, CSV/JSON/SVG
//! emission and the acceptance runner.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use commands::{ensure_out_dir, exit_code_for, Ctx, EXIT_CONFIG};
use config::RunConfig;
use output::Stamp;

#[derive(Parser)]
#[command(
    name = "fracreg",
    version,
    about = "Numerical laboratory for the fractional p-Laplacian Dirichlet problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration (optional for `verify`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output].dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized campaigns (overrides [output].seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Halve the grid/quadrature spacing this many times.
    #[arg(long, global = true, default_value_t = 0)]
    refine: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet problem with the configured constant load.
    Solve,
    /// Solve the torsion problem (unit load).
    Torsion,
    /// Solve the double obstacle problem.
    Obstacle,
    /// Sweep the bump barrier family and fit its operator constants.
    Barrier,
    /// Full boundary-regularity diagnostics with the scaling rerun.
    Diagnose,
    /// Run the acceptance criteria; exit 1 on any failure.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, hash) = match load_config(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let mut cfg = cfg;
    if let Some(seed) = cli.seed {
        cfg.output.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    if cli.refine > 0 {
        cfg.grid.h /= f64::powi(2.0, cli.refine as i32);
    }
    let stamp = Stamp { config_sha256: hash, seed: cfg.output.seed };
    let ctx = Ctx { cfg, out, stamp };
    if let Err(e) = ensure_out_dir(&ctx.out) {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let run = || -> fracreg::Result<i32> {
        match cli.command {
            Command::Solve => commands::cmd_solve(&ctx),
            Command::Torsion => commands::cmd_torsion(&ctx),
            Command::Obstacle => commands::cmd_obstacle(&ctx),
            Command::Barrier => commands::cmd_barrier(&ctx, cli.refine),
            Command::Diagnose => commands::cmd_diagnose(&ctx),
            Command::Verify => commands::cmd_verify(&ctx),
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

fn load_config(cli: &Cli) -> fracreg::Result<(RunConfig, String)> {
    match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                fracreg::FracError::Contract(format!("read config {path:?}: {e}"))
            })?;
            let cfg = RunConfig::parse(&text)?;
            let mut hasher = Sha256::new();
            hasher.update(text.as_bytes());
            Ok((cfg, hex(&hasher.finalize())))
        }
        None => {
            if !matches!(cli.command, Command::Verify) {
                return Err(fracreg::FracError::Contract(
                    "this command requires --config <path>".into(),
                ));
            }
            let cfg = RunConfig::default();
            Ok((cfg, "default".into()))
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
