//! Seeded experiments on top of the `hyperpack` packers: threshold sweeps
//! with Wilson intervals, matching-lemma diagnostics, and CSV/JSON output.

pub mod config;
pub mod lemma6;
pub mod output;
pub mod stats;
pub mod sweep;

pub use config::{Engine, Mode, RowEngine, SweepConfig};
pub use lemma6::{lemma6_diagnostics, Lemma6Params, Lemma6Report};
pub use output::{read_completed, Format, RowSink};
pub use stats::{wilson, Z95};
pub use sweep::{estimate_fixed, estimate_packability, run_sweep, run_sweep_with, RowKey, SweepRow};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hyperpack::Error),
    #[error("engines disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
