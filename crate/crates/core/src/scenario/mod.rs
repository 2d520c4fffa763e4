//! Configuration-driven scenario runs and their reports.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{load_config, ScenarioConfig, SweepSpec, SCENARIO_A, SCENARIO_B};
pub use report::{emit_reports, load_report, write_device_sweeps, Formats};
pub use runner::{run_scenario, MetricsReport, RunOptions, SignalCurve};
