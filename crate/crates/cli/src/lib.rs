//! File formats, trajectory monitoring and the verification suite behind
//! the `formetric` command.

pub mod app;
mod error;
pub mod io;
pub mod monitor;
pub mod verify;

pub use error::CliError;
