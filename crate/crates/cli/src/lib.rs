//! Configuration, reporting and suite runners for the `fwlab` binary.

pub mod config;
pub mod report;
pub mod suites;
