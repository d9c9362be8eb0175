//! Command-line driver for `bv-core`: configuration, the table cache and
//! report writers.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
