//! Run configuration, artifact I/O and stage orchestration for the
//! `billiard` binary.
//!
//! The pipeline is a fixed sequence of stages — classical geometry and
//! dynamics first, then the quantum solve, projections and statistics, and
//! finally a report that assembles figures and tables from artifacts alone.
//! [`config`] parses and validates the TOML run description, [`io`] defines
//! the deterministic on-disk formats, and [`pipeline`] executes the stages.

pub mod config;
pub mod io;
pub mod pipeline;

pub use config::{RunConfig, Stage};
pub use pipeline::{run, PipelineError, RunManifest};
