//! File formats, exporters and the `selfsim` command-line tool for
//! self-similarity systems.
//!
//! Systems are written in the line-oriented `.ssd` format ([`dsl`]); the
//! [`data`] module bundles the standard examples.

pub mod cli;
pub mod data;
pub mod dsl;
pub mod export;
pub mod json;

pub use dsl::{parse_metric, parse_sysdef, print_metric, print_sysdef, Diagnostic, MetricSpec, Parsed};
