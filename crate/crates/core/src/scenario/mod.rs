//! Configuration-driven scenarios behind the `cvbell` command line.

mod config;
mod output;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    merge_tables, parse_assignment, read_config_file, set_path, GridPoint, LhvSettings, OutputFormat, OutputSpec,
    Preset, ScenarioConfig, ScenarioKind, StateSpec, SweepGrid,
};
pub use output::{
    decode_json_rows, encode_rows, format_significant, LhvSearchReport, ResultRow, LHV_COLUMNS, RESULT_COLUMNS,
    SCHEMA_VERSION,
};
pub use run::{
    build_state, derive_seed, evaluate_rows, lhv_report, run, run_evaluate, run_lhv, run_sweep, sweep_rows, RunOutput,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl ScenarioError {
    /// Process exit status: 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. } => 3,
            _ => 2,
        }
    }
}
