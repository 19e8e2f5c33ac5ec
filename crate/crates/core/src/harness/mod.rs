//! Seeded experiments, Monte Carlo tail checks and result persistence.

mod config;
mod experiment;
mod report;
mod tails;

pub use config::{
    ConstantsSpec, ExperimentConfig, MatrixSpec, OutputSpec, ParameterOverrides, SignalSpec,
};
pub use experiment::{
    run_experiment, CellSummary, CertificateVerdict, ExperimentOutput, FailureRecord,
    ResultsTable, TrialRecord, SUCCESS_THRESHOLD,
};
pub use report::{plot_series, report, write_outputs, PlotSeries, ReportFormat};
pub use tails::{validate_tails, TailReport};
