//! Experiment pipelines and file formats around `monostab-core`.
//!
//! The core crate computes; this crate scripts the end-to-end studies
//! (length curves, dilation branches, pocket composites, strip orbits,
//! localization checks, polygon geometry), writes their tables and reports,
//! and exposes everything as CLI subcommands. Identical config and seed
//! give byte-identical output files.

pub mod catalog;
pub mod config;
pub mod csvio;
pub mod error;
pub mod pipelines;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::PipelineError;
pub use report::{Assertion, Report};
