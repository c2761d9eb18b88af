//! Batch front end for the slant-core measurement library.
//!
//! The crate is split into three layers:
//!
//! * [`load`] reads delimited corpus tables from disk, validates them, and
//!   assembles a [`slant_core::corpus::Corpus`], optionally skipping bad rows
//!   and reporting them instead of aborting.
//! * [`report`] serializes analysis results into plain-text artifact tables
//!   plus a key-value manifest that records every input digest and parameter,
//!   so a run can be reproduced byte for byte.
//! * [`cli`] wires both into the `slant` binary: argument parsing, subcommand
//!   dispatch, and exit-code mapping.

pub mod cli;
pub mod load;
pub mod report;
