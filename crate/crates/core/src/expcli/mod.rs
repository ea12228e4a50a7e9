//! Experiment harness: configuration, seeded parallel runs, sweeps, CSV and
//! SVG artifacts.

pub mod config;
mod io;
mod runner;
pub mod svg;

pub use config::{load_config, parse_config, ExperimentConfig, GraphSpec, SweepAxis, SweepSpec, SweepValue};
pub use runner::{
    build_world, correlation_rows, execute_run, recompute_metrics, render_metrics_dir, run_dir_name, run_experiment, run_sweep,
    CorrelationRow, ExperimentSummary, Manifest, ManifestRun, RunMetrics, RunOutput, RunSummary, RunWorld, SweepRow,
};
