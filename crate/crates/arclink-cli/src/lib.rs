//! Batch front-end for the arc linkage engine: file ingestion, pair
//! screening, linkage runs and JSON reports. The `arclink` binary is a thin
//! wrapper over this library so the whole pipeline stays testable.

pub mod config;
pub mod ephemeris;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use ingest::{ingest, parse_pairs, ObservedArc};
pub use pipeline::{default_pairs, run_linkage_batch, RunOptions};
pub use report::PairReport;
