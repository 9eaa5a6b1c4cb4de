//! Experiment harness for `hetrank`: TOML configs, presets, the `gen`, `run`,
//! `gadget` and `bench` commands, and CSV/SVG reporting.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod preset;
pub mod report;

pub use config::Config;
pub use error::CliError;
