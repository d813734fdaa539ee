//! Scenario runner around the `ebath` library: configuration parsing, unit
//! conversion at the boundary, deterministic parallel execution, and
//! CSV/JSON emission.
//!
//! Every scenario is a pure function of (config, seed); worker pools only
//! evaluate independent items collected in index order, so summaries are
//! byte-identical across thread counts.

pub mod config;
pub mod csvio;
pub mod mc;
pub mod runner;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use runner::{run, RunError};
