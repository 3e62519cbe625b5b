//! Standard-library companion to `qp2-core`: file formats (factor
//! records, the Bernoulli value cache), report rendering (text, JSON,
//! Markdown, TSV), the census tables, and the parallel range runner
//! behind the `qp2` command-line tool.

pub mod data;
pub mod files;
pub mod report;
pub mod runner;
pub mod tables;

pub use qp2_core as core;
