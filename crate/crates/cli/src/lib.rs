//! Command-line driver: configuration, commands and reports.

pub mod commands;
pub mod config;
pub mod report;
