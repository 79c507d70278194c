//! Scenario construction, replication, statistics and CSV output.

pub mod experiment;
pub mod monitor;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use experiment::{run_experiment, ScenarioResult};
pub use monitor::{run_monitor, MonitorConfig, RunRecord};
pub use scenario::{build_scenario, Schedule, ScenarioSpec, SCENARIO_IDS};
pub use sweep::{delay_rate_check, sweep_n, RateRow, SweepEntry};
