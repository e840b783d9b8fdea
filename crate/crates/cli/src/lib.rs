//! Scenario runner for `nlfront-core`: JSON configs, built-in presets and
//! CSV/JSON artifacts.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use config::{Command, ScenarioConfig};
pub use error::{CliError, Exit};
pub use run::{run, Overrides, RunOutcome};
