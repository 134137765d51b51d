//! Experiment runner for the perfgrid library: declarative configs, table
//! artifacts, CSV and SVG output, and self-checks.

pub mod artifact;
pub mod config;
pub mod figures;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod selftest;
