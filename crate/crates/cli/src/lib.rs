//! Library surface behind the `echelon` binary: experiment manifests,
//! the run driver, cross-run aggregation, indicator computation, and
//! the CSV/snapshot formats.

pub mod aggregate;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod metrics_cmd;
pub mod operational;
pub mod runner;
pub mod snapshots;
