//! JSON input documents in, verification reports out.
//!
//! Exit codes: 0 every verdict passed, 1 some verdict failed, 2 usage or a spec
//! the command cannot take, 3 unreadable or invalid input.

pub mod build;
pub mod dot;
pub mod error;
pub mod output;
pub mod run;
pub mod spec;

pub use error::CliError;
pub use run::{run, CliReport, Command, Flags, Output};
pub use spec::{parse_spec, parse_spec_str, SpecDocument};
