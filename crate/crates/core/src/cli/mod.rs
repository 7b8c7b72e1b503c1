//! Configuration and command implementations behind the `chiral-lens` binary.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_defaults, cmd_render, cmd_solve, cmd_sweep, cmd_trace_check, CliError, CliResult, SweepRange,
};
pub use config::{ConfigError, RunConfig, Scenario, ScreenSelector};
