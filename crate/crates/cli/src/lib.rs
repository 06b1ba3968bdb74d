//! Library side of the `tbm` command: evidence documents and the commands
//! that transform them.

pub mod commands;
pub mod document;
pub mod error;

pub use document::{DocKind, EvidenceDocument};
pub use error::CliError;
