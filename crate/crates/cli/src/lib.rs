//! Command-line front-end: records files in, reports out.

pub mod cli;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod objectives;

pub use commands::{run, Outcome};
pub use error::{CliError, Result};
