//! Thin command-line front end for the restoration pipeline.
//!
//! Exit codes: 0 success, 1 solver failure, 2 usage or validation error.

use clap::{Args, Parser, Subcommand};
use proxsplit::pipeline::config::{Algorithm, RunConfig};
use proxsplit::pipeline::{cmd_prox, cmd_restore, cmd_simulate, validate};
use proxsplit::prox::Power;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "proxsplit",
    about = "Constrained proximal-splitting image restoration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file (key = value lines, dotted sections).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for observation / restoration artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's extension theta.
    #[arg(long)]
    theta: Option<f64>,
    /// Override the config's solver algorithm (dr-outer or fb-outer).
    #[arg(long)]
    algorithm: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Degrade an input image (blur plus noise) and write the observation.
    Simulate(RunArgs),
    /// Restore an observation with one of the nested solvers.
    Restore(RunArgs),
    /// Run the full invariant suite at desk scale.
    Validate,
    /// Evaluate a scalar proximity operator.
    Prox(ProxArgs),
}

#[derive(Args)]
struct ProxArgs {
    /// Weight of the absolute-value term.
    #[arg(long, default_value_t = 0.0)]
    chi: f64,
    /// Weight of the power term.
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    /// Exponent of the power term: 4/3, 3/2 or 2.
    #[arg(long, default_value = "2")]
    p: String,
    /// Prox scale.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Evaluation point.
    #[arg(long)]
    t: f64,
    /// Optional closed interval constraint: two endpoints.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    r#box: Option<Vec<f64>>,
}

fn load_config(args: &RunArgs) -> Result<RunConfig, proxsplit::pipeline::PipelineError> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(theta) = args.theta {
        if !(theta > 0.0) {
            return Err(proxsplit::pipeline::config::ConfigError::BadValue {
                key: "--theta".to_string(),
                reason: "must be > 0".to_string(),
            }
            .into());
        }
        cfg.theta = theta;
    }
    if let Some(algorithm) = &args.algorithm {
        cfg.algorithm = Algorithm::parse(algorithm).ok_or_else(|| {
            proxsplit::pipeline::config::ConfigError::BadValue {
                key: "--algorithm".to_string(),
                reason: "allowed values: dr-outer, fb-outer".to_string(),
            }
        })?;
    }
    Ok(cfg)
}

fn run() -> Result<(), (String, i32)> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => {
            let cfg = load_config(&args).map_err(|e| (e.to_string(), e.exit_code()))?;
            let paths =
                cmd_simulate(&cfg, &args.out).map_err(|e| (e.to_string(), e.exit_code()))?;
            println!("observation {}", paths.observation_data.display());
            println!("preview     {}", paths.observation_preview.display());
            println!("metadata    {}", paths.observation_meta.display());
            Ok(())
        }
        Command::Restore(args) => {
            let cfg = load_config(&args).map_err(|e| (e.to_string(), e.exit_code()))?;
            let summary =
                cmd_restore(&cfg, &args.out).map_err(|e| (e.to_string(), e.exit_code()))?;
            println!(
                "algorithm {} theta {} outer-iterations {} objective {:.9e}",
                summary.algorithm.name(),
                summary.theta,
                summary.outer_iterations,
                summary.objective_final
            );
            if let (Some(d), Some(r)) = (summary.snr_degraded, summary.snr_restored) {
                println!("snr degraded {d:.3} dB -> restored {r:.3} dB");
            }
            println!("outputs in {}", args.out.display());
            Ok(())
        }
        Command::Validate => {
            let failures =
                validate::run_all(std::io::stdout()).map_err(|e| (e.to_string(), 2))?;
            if failures > 0 {
                Err((format!("{failures} check(s) failed"), 1))
            } else {
                Ok(())
            }
        }
        Command::Prox(args) => {
            let p = Power::parse(&args.p)
                .ok_or_else(|| ("--p accepts 4/3, 3/2 or 2".to_string(), 2))?;
            let interval = args.r#box.as_ref().map(|b| (b[0], b[1]));
            let value = cmd_prox(args.chi, args.omega, p, args.gamma, args.t, interval)
                .map_err(|e| (e.to_string(), e.exit_code()))?;
            println!("{value:.15e}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((message, code)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
