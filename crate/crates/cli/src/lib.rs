//! Command-line driver for `bmm-core`: configuration, file formats, reports
//! and the property suites.

pub mod config;
pub mod error;
pub mod io;
pub mod par;
pub mod plots;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{Command, RunConfig};
pub use error::CliError;
pub use report::RunReport;
pub use run::run;
