//! IO, file formats, statistics, and the batch CLI around `glmp-core`.

pub mod analysis;
pub mod cli;
pub mod ingestion;
pub mod reporting;
