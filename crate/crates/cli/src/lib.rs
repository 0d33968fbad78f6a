//! Command implementations behind the `nhmagic` binary.
//!
//! Every command reads one JSON configuration and writes CSV/JSON files with
//! a `.meta.json` sidecar (or an embedded `meta` block) recording parameters,
//! units, seed, tool version and timestamp.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, CliResult};
