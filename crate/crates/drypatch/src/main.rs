//! Command-line front end. All logic lives in the library; this binary
//! parses arguments, loads the configuration and maps errors to exit
//! codes: 0 success, 1 partial or run failure, 2 invalid input.

use clap::{Parser, Subcommand};
use drypatch::config::{Family, Preset, ScenarioConfig};
use drypatch::error::Error;
use drypatch::scenario;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "drypatch", version, about = "Localised radial vegetation patterns: bifurcation data, amplitude equations, branch continuation and radial stability")]
struct Cli {
    /// TOML configuration file (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Grid preset: desk (300, 1000) or paper (400, 2000).
    #[arg(long, global = true, value_parser = parse_preset)]
    preset: Option<Preset>,

    /// Restrict to one shading value.
    #[arg(long, global = true)]
    rho: Option<f64>,

    /// Restrict to one family (spot_a, gap_sub, gap_super).
    #[arg(long, global = true)]
    family: Option<String>,

    /// Worker threads for scenario branches.
    #[arg(long, global = true)]
    max_workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants, normal-form coefficients and Turing onsets.
    Bifpoints,
    /// Uniform states over a precipitation sweep.
    Uniform,
    /// Ginzburg-Landau ground states and their fitted constants.
    Amplitude {
        /// Linear coefficient of the cubic equation.
        #[arg(long)]
        c0: Option<f64>,
        /// Cubic coefficient of the cubic equation.
        #[arg(long)]
        c3: Option<f64>,
    },
    /// Converge a single localised profile.
    Solve,
    /// Trace one branch with fold detection and stability.
    #[command(name = "continue")]
    Continue,
    /// Radial stability report for a stored profile.
    Stability {
        /// Profile CSV written by `solve`, `continue` or `scenario`.
        #[arg(long)]
        profile: PathBuf,
    },
    /// Full study: all configured shading cases and families.
    Scenario,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    match s.to_ascii_lowercase().as_str() {
        "desk" => Ok(Preset::Desk),
        "paper" => Ok(Preset::Paper),
        other => Err(format!("unknown preset '{other}' (expected desk or paper)")),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParams(_)
        | Error::OutOfValidity(_)
        | Error::BadGrid(_)
        | Error::Config(_)
        | Error::DomainError(_) => 2,
        _ => 1,
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(preset) = cli.preset {
        cfg.apply_preset(preset);
    }
    if let Some(rho) = cli.rho {
        cfg.rho_cases = vec![rho];
        cfg.params.rho = rho;
    }
    if let Some(family) = &cli.family {
        cfg.families = vec![Family::parse(family)?];
    }
    if let Some(workers) = cli.max_workers {
        cfg.max_workers = workers;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    let out_dir = cfg.output_dir.clone();

    match cli.command {
        Command::Bifpoints => {
            scenario::cmd_bifpoints(&cfg, &out_dir)?;
            Ok(0)
        }
        Command::Uniform => {
            scenario::cmd_uniform(&cfg, &out_dir)?;
            Ok(0)
        }
        Command::Amplitude { c0, c3 } => {
            scenario::cmd_amplitude(&cfg, &out_dir, c0, c3)?;
            Ok(0)
        }
        Command::Solve => {
            let rho = cfg.rho_cases.first().copied().unwrap_or(cfg.params.rho);
            let family = cfg.families.first().copied().unwrap_or(Family::SpotA);
            scenario::cmd_solve(&cfg, &out_dir, rho, family)?;
            Ok(0)
        }
        Command::Continue => {
            let rho = cfg.rho_cases.first().copied().unwrap_or(cfg.params.rho);
            let family = cfg.families.first().copied().unwrap_or(Family::SpotA);
            scenario::cmd_continue(&cfg, &out_dir, rho, family)?;
            Ok(0)
        }
        Command::Stability { profile } => {
            scenario::cmd_stability(&cfg, &out_dir, &profile)?;
            Ok(0)
        }
        Command::Scenario => {
            let manifest = scenario::cmd_scenario(&cfg, &out_dir)?;
            println!(
                "scenario complete: {} branches, {} failed; manifest at {}",
                manifest.total_branches,
                manifest.failed_branches,
                out_dir.join("manifest.json").display()
            );
            if manifest.total_branches > 0 && manifest.failed_branches == manifest.total_branches {
                eprintln!("all branches failed");
                Ok(1)
            } else if manifest.failed_branches > 0 {
                // partial failure: recorded in the manifest
                Ok(1)
            } else {
                Ok(0)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
