//! Experiment matrices: configuration, runs, distance metrics and outputs.

mod config;
mod metrics;
mod output;
mod runner;

pub use config::{ExperimentConfig, InstanceRef, LearnerSpec, ToleranceOverrides};
pub use metrics::{empirical_model, fit_rate, measure_distance, MetricsRow, RateFit, RunDetails, MIN_FIT_DIST};
pub use output::{
    metrics_csv, plot_data, rate_reports, read_metrics_csv, write_atomic, write_outputs, RateReport, CSV_HEADER,
};
pub use runner::{grid_actions, run_cell, run_matrix, seed_offset, SEED_OFFSET_VAR};
