use bergman_core::kernel::ClosedFormKernel;
use bergman_lab::{oracle, run_config, write_outputs, ExperimentConfig, LabError};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lab", version, about = "Bergman kernel curvature experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV, metadata and optional SVG.
    Run {
        config: PathBuf,
        /// Worker threads; 1 gives bit-exact reproducible output.
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Closed-form curvature spot check.
    Oracle {
        kind: OracleKind,
        /// Dimension of the ball.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Polydisc radii.
        #[arg(long, value_delimiter = ',', default_value = "1,1")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 0.9)]
        max_radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Ball,
    Polydisc,
}

fn run(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Run { config, threads, out, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if threads == Some(0) {
                return Err(LabError::Config("--threads must be positive".into()));
            }
            let (result, meta) = run_config(&cfg, threads)?;
            let written = write_outputs(&cfg, &result, &meta, &out)?;
            println!("{}", written.csv.display());
            println!("{}", written.metadata.display());
            if let Some(svg) = written.svg {
                println!("{}", svg.display());
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            println!("ok: {} ({})", cfg.name, cfg.experiment.kind());
        }
        Command::Oracle { kind, n, radii, points, max_radius, seed } => {
            let kernel = match kind {
                OracleKind::Ball if n == 0 => return Err(LabError::Config("n must be positive".into())),
                OracleKind::Ball => ClosedFormKernel::ball(n),
                OracleKind::Polydisc if radii.iter().any(|r| !(*r > 0.0)) => {
                    return Err(LabError::Config("radii must be positive".into()))
                }
                OracleKind::Polydisc => ClosedFormKernel::polydisc(radii),
            };
            let report = oracle::check(&kernel, points, max_radius, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
