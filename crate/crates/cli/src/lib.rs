//! Configuration-driven experiment runner: builds geometries from a TOML
//! config, runs the named experiments and writes a JSON report plus CSV
//! tables per experiment.

pub mod config;
pub mod experiments;
pub mod report;
pub mod setup;

use std::path::{Path, PathBuf};

use fibrelab_curvature::CurvatureError;
use fibrelab_flow::FlowError;
use fibrelab_geometry::GeometryError;
use fibrelab_invariants::InvariantsError;
use fibrelab_oracle::OracleError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use experiments::{verify_all, Experiment};
pub use report::{ExperimentReport, Table, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("experiment error: {0}")]
    Experiment(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Invariants(#[from] InvariantsError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            _ => 1,
        }
    }
}

/// Runs one experiment and writes its outputs under `out/<name>/`.
pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let report = experiment.run(cfg)?;
    report.write(&experiment_dir(&cfg.output, experiment.name()))?;
    Ok(report)
}

/// Runs every experiment, writing each under its own directory and the
/// summary under `out/verify-all/`.
pub fn run_all(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<ExperimentReport>), CliError> {
    let (summary, reports) = verify_all(cfg)?;
    for r in &reports {
        r.write(&experiment_dir(&cfg.output, &r.experiment))?;
    }
    summary.write(&experiment_dir(&cfg.output, "verify-all"))?;
    Ok((summary, reports))
}

pub fn experiment_dir(out: &Path, name: &str) -> PathBuf {
    out.join(name)
}
