//! Scenario runner, plot-data export and verification suite.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod verify;

pub use config::{ConfigError, ScenarioConfig};
pub use error::CliError;
