//! Experiment runner for the nltrace laboratory: config parsing, dispatch and artifacts.

pub mod compare;
pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::Result;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::RunOutput;

/// Outcome of `run`: the artifacts written and whether every check passed.
#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub output: RunOutput,
}

/// Runs a resolved config inside a pool of the configured width and writes its artifacts.
pub fn run_config(cfg: &ExperimentConfig, out_dir: Option<&Path>, threads: Option<usize>) -> Result<RunSummary> {
    let width = threads.or(cfg.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(width).build()?;
    let output = pool.install(|| experiments::run(cfg))?;
    let dir = output::output_dir(cfg, out_dir);
    let files = output::write_all(cfg, &output, &dir)?;
    Ok(RunSummary { dir, files, output })
}
