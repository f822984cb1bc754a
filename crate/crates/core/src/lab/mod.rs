//! Experiment configuration, command drivers and check reports.

pub mod check;
pub mod commands;
pub mod config;

pub use check::{Check, CRITERIA};
pub use config::ExperimentConfig;
