//! File formats, dataset registry, reports and command-line workflow around
//! [`clinrel_core`].
//!
//! The workflow mirrors the evaluation protocol: validate the registry, sweep
//! generator checkpoints with directional KID, draw t-SNE scatter plots per
//! checkpoint, run the real vs. real+synthetic classification experiment, and
//! juxtapose all three in one report.

pub mod commands;
pub mod config;
pub mod error;
pub mod fvec;
pub mod parallel;
pub mod registry;
pub mod report;
pub mod svg;
pub mod workflow;

pub use error::{Error, Result};
