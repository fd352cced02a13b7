//! Scenario files, CSV and summary output, parameter sweeps and the command
//! line front end for `geoslam-core`.

pub mod app;
pub mod output;
pub mod scenario_file;
pub mod sweep;

pub use scenario_file::{load_scenario, parse_scenario, LoadError, LoadedScenario, SCHEMA_VERSION};
pub use sweep::{parse_values, sweep};
