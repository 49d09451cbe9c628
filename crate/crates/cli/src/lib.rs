//! Command-line front end for `triplewave`: scenario configuration, data
//! emission for plotting, and the verification suite.

// `!(x > 0)` is used on purpose: unlike `x <= 0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{Outcome, Overrides};
pub use config::ScenarioConfig;
pub use error::CliError;
