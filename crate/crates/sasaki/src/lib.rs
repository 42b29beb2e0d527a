//! File formats, reports, the verification suite and the command-line
//! front end for `sasaki-core`.

pub mod cli;
pub mod error;
pub mod grid_io;
pub mod report;
pub mod verify;

pub use error::{CliError, ExitCode};
