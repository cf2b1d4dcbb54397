//! Scenario files and the subcommands of the `hs` binary.

pub mod commands;
pub mod examples;
pub mod scenario;
