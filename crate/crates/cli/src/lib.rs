//! Configuration, subcommands, CSV output and seeded random harnesses for
//! the `pcw` command-line tool.

pub mod commands;
pub mod config;
pub mod emit;
pub mod sampling;
pub mod suites;
pub mod survey;

pub use commands::{run, Command, Output, Status, EXIT_CONFIG};
pub use config::{load, parse_config, Backend, ConfigError, RunConfig};
