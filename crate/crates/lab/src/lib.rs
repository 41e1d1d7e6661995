//! Experiment runner for truncated Bergman kernel curvature studies.
//!
//! An experiment is described by a JSON [`ExperimentConfig`]; running it
//! produces a [`ResultTable`] written as CSV, a metadata JSON file and an
//! optional SVG chart.

pub mod config;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod plot;
pub mod table;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use experiments::RunOutput;
pub use table::{ResultTable, RunMetadata};

use std::path::{Path, PathBuf};
use std::time::Instant;

/// Runs `cfg` on `threads` workers, or on the global pool when `None`.
pub fn run_config(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<(RunOutput, RunMetadata)> {
    cfg.validate()?;
    let start = Instant::now();
    let out = match threads {
        Some(t) => bergman_core::parallel::with_threads(t, || experiments::run(cfg))?,
        None => experiments::run(cfg)?,
    };
    let meta = RunMetadata {
        name: cfg.name.clone(),
        experiment: cfg.experiment.kind().to_string(),
        seed: cfg.seed,
        threads: threads.unwrap_or_else(bergman_core::parallel::num_threads),
        wall_time_s: start.elapsed().as_secs_f64(),
        models: out.models.clone(),
        config: serde_json::to_value(cfg)?,
        calibration: cfg.calibration.clone(),
    };
    Ok((out, meta))
}

/// Paths of the files written for one run.
#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub metadata: PathBuf,
    pub svg: Option<PathBuf>,
}

pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput, meta: &RunMetadata, dir: &Path) -> Result<Written> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", cfg.name));
    std::fs::write(&csv, out.table.to_csv())?;
    let metadata = dir.join(format!("{}.meta.json", cfg.name));
    std::fs::write(&metadata, serde_json::to_string_pretty(meta)?)?;
    let svg = match (&out.chart, cfg.output.svg) {
        (Some(chart), true) => {
            let path = dir.join(format!("{}.svg", cfg.name));
            std::fs::write(&path, chart.to_svg())?;
            Some(path)
        }
        _ => None,
    };
    Ok(Written { csv, metadata, svg })
}
