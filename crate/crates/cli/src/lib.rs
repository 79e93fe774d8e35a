//! Configuration parsing and command execution behind the `cornermhd`
//! binary.

pub mod commands;
pub mod config;
