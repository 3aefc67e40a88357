//! Configuration-driven experiment runner for the multi-subdomain DNWR
//! solver: flat key-value configs or built-in presets in, convergence
//! histories as CSV out.

pub mod config;
pub mod presets;
pub mod runner;

pub use config::{parse_config, CliError, ExperimentConfig, Initializer, Strips};
pub use presets::{find as find_preset, Preset};
pub use runner::{execute, parse_csv, render_csv, run_experiment, ExperimentResult, ThetaRun};
