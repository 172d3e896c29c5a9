//! Configuration, experiment execution, statistics, reports and the CLI.

pub mod budget;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod registry;
pub mod report;
pub mod stats;

pub use budget::{budget_for, check, Budget, BudgetCheck};
pub use cli::run_cli;
pub use config::{parse_input, Experiment, ExperimentConfig, ReportFormat};
pub use experiment::{collect_inputs, run_experiment, VERSION};
pub use registry::{QuantumResult, RecognizerKind, RecognizerName, RunContext};
pub use report::{emit_report, ExactRow, InputRow, Report, Summary};
pub use stats::{wilson_interval, AcceptanceEstimate, EstimateMode, StatsSummary};
