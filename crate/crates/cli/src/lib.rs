//! Scenario-driven command line front end for `areal-core`.
//!
//! A run parses a JSON scenario, builds the core objects, evaluates one
//! subcommand and renders the rows as CSV and as a short text report.

pub mod build;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use report::{Row, Status};
pub use run::{run, Command, Options, Outcome};
pub use scenario::Scenario;
