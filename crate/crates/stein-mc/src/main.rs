//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stein_mc::harness::{
    emit_report, ground_truth, preset, run_experiment, slopes_from_csv, ExperimentConfig,
    PRESET_NAMES,
};
use stein_mc::{Error, Method, Result};

/// Output directory override; takes precedence over `--out`.
const OUT_ENV: &str = "STEIN_MC_OUT";

#[derive(Parser)]
#[command(name = "stein-mc", about = "Stein-kernelized Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated MSE experiment and write mse.csv plus summary.json.
    Run {
        /// JSON experiment configuration file.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Named preset instead of a config file.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated method subset override.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
    },
    /// Print the Monte Carlo ground truth for a configuration.
    GroundTruth {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit per-method log-log slopes from an emitted mse.csv.
    Slopes {
        #[arg(long)]
        report: PathBuf,
    },
}

fn load_config(
    config: Option<PathBuf>,
    preset_name: Option<String>,
) -> Result<ExperimentConfig> {
    match (config, preset_name) {
        (Some(path), None) => ExperimentConfig::load(&path),
        (None, Some(name)) => preset(&name).map_err(|e| {
            Error::Config(format!("{e}; available presets: {}", PRESET_NAMES.join(", ")))
        }),
        _ => Err(Error::Config("pass exactly one of --config or --preset".into())),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            preset,
            out,
            seed,
            methods,
        } => {
            let mut config = load_config(config, preset)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(methods) = methods {
                config.methods = methods;
            }
            config.validate()?;
            let out = std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .or(out)
                .unwrap_or_else(|| PathBuf::from("."));
            let report = run_experiment(&config)?;
            let (csv_path, json_path) = emit_report(&report, &out)?;
            println!(
                "experiment '{}': theta = {} (se {})",
                config.name, report.theta, report.theta_se
            );
            for s in &report.slopes {
                println!("slope {} = {:.3} (se {:.3})", s.method, s.slope, s.se);
            }
            println!("wrote {} and {}", csv_path.display(), json_path.display());
        }
        Command::GroundTruth { config } => {
            let config = ExperimentConfig::load(&config)?;
            let (theta, se) = ground_truth(
                &config.target.build()?,
                &config.noise.build(),
                &config.integrand,
                config.ground_truth_n,
                config.seed,
            )?;
            println!("theta = {theta} (se {se}, n = {})", config.ground_truth_n);
        }
        Command::Slopes { report } => {
            for s in slopes_from_csv(&report)? {
                println!("{},{},{}", s.method, s.slope, s.se);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
