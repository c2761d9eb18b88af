//! Quantifying media slant from congressional coverage.
//!
//! The library measures how an outlet's references to legislators deviate from a
//! baseline expectation, expressed as log-odds ratios with closed-form variances.
//! On top of the per-outlet scores it provides random-effects pooling across
//! outlets, sliding-window slant dynamics with pre/post shift regression,
//! hyperlink and sentiment coverage statistics, and a preferential-attachment
//! model of how coverage concentrates on a few legislators.
//!
//! Everything here works on in-memory data and is `no_std`-compatible
//! (`alloc` required; disable the `std` feature and enable `libm`). File
//! ingestion, report emission, and the command-line interface live in the
//! companion `slant-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features for float math");

pub mod corpus;
pub mod coverage;
pub mod dynamics;
pub mod error;
pub mod genmodel;
pub mod measures;
pub mod pooling;
pub mod special;
pub mod stats;

mod date;
mod math;

pub use date::{DateWindow, Day};
pub use error::Error;
