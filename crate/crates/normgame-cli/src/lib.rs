//! Implementation of the `normgame` command-line tool.

pub mod app;
pub mod chart;
pub mod config;
pub mod error;
pub mod records;
pub mod sweep;
