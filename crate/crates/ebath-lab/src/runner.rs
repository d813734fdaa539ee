//! Scenario dispatch: builds the worker pool, runs the selected scenario,
//! writes bulk CSV data into the output directory and returns the JSON
//! summary destined for stdout.

use std::path::Path;

use crate::config::{Scenario, ScenarioConfig};
use crate::scenarios;

/// Failure classes mapped to process exit codes by the binary.
#[derive(Debug)]
pub enum RunError {
    /// Exit 2: configuration failed to parse or validate.
    Validation(String),
    /// Exit 3: a numeric routine failed (tolerance, kinematics, ...).
    Numeric(String),
    /// Exit 4: filesystem failure.
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(m) => write!(f, "validation error: {m}"),
            RunError::Numeric(m) => write!(f, "numeric error: {m}"),
            RunError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

/// Classify a core-library error raised while resolving configuration.
pub fn validation(e: impl std::fmt::Display) -> RunError {
    RunError::Validation(e.to_string())
}

/// Classify a core-library error raised during computation.
pub fn numeric(e: impl std::fmt::Display) -> RunError {
    RunError::Numeric(e.to_string())
}

/// Run the configured scenario; bulk outputs land in `out_dir`, the JSON
/// summary is written to `out_dir/summary.json` and returned.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<String, RunError> {
    cfg.validate().map_err(RunError::Validation)?;
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| RunError::Validation(e.to_string()))?;
    let summary = pool.install(|| match &cfg.scenario {
        Scenario::Wavepacket(c) => scenarios::wavepacket::run(c, cfg.seed, out_dir),
        Scenario::Twoslit(c) => scenarios::twoslit::run(c, cfg.seed, out_dir),
        Scenario::Kinetics(c) => scenarios::kinetics::run(c, cfg.seed, out_dir),
        Scenario::Irkernel(c) => scenarios::irkernel::run(c, cfg.seed, out_dir),
        Scenario::Gausslaw(c) => scenarios::gausslaw::run(c, cfg.seed, out_dir),
        Scenario::UnitsCheck(c) => scenarios::units_check::run(c, cfg.seed, out_dir),
    })?;
    let path = out_dir.join("summary.json");
    std::fs::write(&path, summary.as_bytes())?;
    Ok(summary)
}
