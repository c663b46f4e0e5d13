//! Input documents and subcommands behind the `ainf` binary.

pub mod commands;
pub mod document;
