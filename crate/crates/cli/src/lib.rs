//! Command-line pipeline around `sphere_sne`: simulate data, embed it,
//! score and plot the result, and run the comparison grid.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod plot;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, Result};
