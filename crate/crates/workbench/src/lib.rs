//! Experiment harness around the `greenroute` solvers: REPETITA ingestion,
//! preprocessing, batch runs and reports.

pub mod activation_csv;
pub mod config;
pub mod experiment;
pub mod preprocess;
pub mod repetita;
pub mod report;

pub use config::{Algorithm, ExperimentConfig};
pub use experiment::{run_algorithm, run_experiment, Outcome, RunStatus};
pub use preprocess::{preprocess, LengthMode};
pub use repetita::{parse_repetita_demands, parse_repetita_graph, RepetitaInstance};
pub use report::{emit_report, ReportFormat, ReportRow};
