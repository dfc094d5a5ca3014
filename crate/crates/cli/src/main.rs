//! `shadows`: seeded experiment driver.
//!
//! Exit codes: 0 all assertions passed, 1 an assertion failed, 2 bad
//! configuration or input, 3 a capacity guard or iteration cap was hit,
//! 4 I/O failure.

mod commands;
mod config;
mod failure;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{Defaults, ExperimentConfig};
use failure::Failure;
use report::Writer;

#[derive(Parser)]
#[command(name = "shadows", version, about = "Shadow experiments on symmetric polytopes")]
struct Cli {
    /// JSON experiment config (unknown keys are rejected)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `out`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Body file, overriding the config's `body`
    #[arg(long, global = true)]
    body: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Move a body (file or random) to shadow position
    ShadowPosition,
    /// Weighted projection inequality for orthonormal, contact and random decompositions
    VerifyT3,
    /// Zonotope volume by two routes, and the volume lower bound
    Zonotope,
    /// Maximal-volume body of a random slab family, with its shadow identity
    MinkowskiSolve,
    /// Large-shadow random bodies over a range of seeds
    Pathological,
    /// Shadow of the unit-volume ball for n = 2..n_max
    BallRatio,
    /// Surface area from the mean shadow
    CauchyCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ShadowPosition => "shadow-position",
            Command::VerifyT3 => "verify-t3",
            Command::Zonotope => "zonotope",
            Command::MinkowskiSolve => "minkowski-solve",
            Command::Pathological => "pathological",
            Command::BallRatio => "ball-ratio",
            Command::CauchyCheck => "cauchy-check",
        }
    }

    fn defaults(self) -> Defaults {
        let (n, m, tolerance, samples) = match self {
            Command::ShadowPosition => (3, 6, 1e-8, 1),
            Command::VerifyT3 => (3, 6, 1e-8, 50),
            Command::Zonotope => (3, 6, 1e-9, 100),
            Command::MinkowskiSolve => (3, 6, 1e-9, 1000),
            Command::Pathological => (4, 8, 1e-9, 1),
            Command::BallRatio => (2, 2, 1e-9, 1),
            Command::CauchyCheck => (3, 3, 1e-9, 100_000),
        };
        Defaults { n, m, tolerance, samples }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let start = Instant::now();
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.body.is_some() {
        cfg.body = cli.body.clone();
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let resolved = cfg.resolve(cli.command.name(), cli.command.defaults())?;

    let outcome = match cli.command {
        Command::ShadowPosition => commands::shadow_position_cmd(&resolved)?,
        Command::VerifyT3 => commands::verify_t3_cmd(&resolved)?,
        Command::Zonotope => commands::zonotope_cmd(&resolved)?,
        Command::MinkowskiSolve => commands::minkowski_cmd(&resolved)?,
        Command::Pathological => commands::pathological_cmd(&resolved)?,
        Command::BallRatio => commands::ball_ratio_cmd(&resolved)?,
        Command::CauchyCheck => commands::cauchy_cmd(&resolved)?,
    };

    let writer = Writer {
        dir: &out_dir,
        json: cli.format != Format::Csv,
        csv: cli.format != Format::Json,
    };
    writer.write(cli.command.name(), &resolved, &outcome, start.elapsed().as_secs_f64())?;

    for a in &outcome.assertions {
        let tag = if a.passed { "PASS" } else { "FAIL" };
        if a.detail.is_empty() {
            println!("{tag} {}", a.name);
        } else {
            println!("{tag} {}: {}", a.name, a.detail);
        }
    }
    let failed = outcome.assertions.iter().filter(|a| !a.passed).count();
    println!(
        "{}: {} assertions, {failed} failed; report in {}",
        cli.command.name(),
        outcome.assertions.len(),
        out_dir.display()
    );
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let diag = json!({ "error": f.kind(), "message": f.to_string(), "exit_code": f.exit_code() });
            eprintln!("{diag}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
