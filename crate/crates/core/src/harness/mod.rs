//! Scenario harness: configuration, execution and CSV/JSON output.

pub mod config;
pub mod output;
pub mod runner;
pub mod selftest;

pub use config::{parse_config, parse_config_str, EllGrid, InitialState, Scenario, ScenarioKind};
pub use output::{emit_csv, emit_saturation_table, emit_time_series, SaturationRow, Table, TimeSeries};
pub use runner::{compute_scenario, compute_scenario_with, run_scenario, write_outputs, ScenarioOutput};
