//! Library side of the `pisot` binary: configs, subcommands and the two pipelines.

pub mod commands;
pub mod config;
pub mod pipeline;
