//! Front end for the `amar` command: CSV ingestion, configuration, plot
//! data and subcommand drivers.

pub mod app;
pub mod config;
pub mod exit;
pub mod ingest;
pub mod plotdata;
