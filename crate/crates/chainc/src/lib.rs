//! File formats, catalog store, and CLI for the chain compiler.
//!
//! [`chainc_core`] owns the language: parsing, the flat component model, and
//! expansion into forwarding graphs. This crate adds everything that touches
//! the outside world:
//!
//! * [`yang`] reads and writes component models as JSON or XML instance
//!   documents shaped after the service data model,
//! * [`catalog`] stores named models on disk and resolves links between them,
//! * [`cli`] is the `chainc` command-line tool built on both.

pub mod catalog;
pub mod cli;
pub mod yang;
