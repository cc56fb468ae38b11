//! Command-line pipeline: CSV ingestion, calibration reports, and the
//! subcommands behind the `subordinated` binary.

pub mod calibration;
pub mod cli;
pub mod csvio;
pub mod report;

use serde::{Deserialize, Serialize};

pub use calibration::{
    run_calibration, select_model, CalibrationConfig, CalibrationReport, ModelChoice, SelectedModel, SelectionRule,
};
pub use cli::{run, Cli};
pub use csvio::{ingest_csv, ingest_csv_labeled, read_ensemble, write_ensemble, write_ensemble_file, LabeledEnsemble};
pub use report::{emit_report, OutputFormat};

/// Where a report came from. Together with the config echo stored next to it,
/// this is enough to rerun the command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub input: Option<String>,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, input: Option<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            seed,
            input,
        }
    }
}
