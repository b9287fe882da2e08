//! Shared pieces of the `acl` command-line tool.

pub mod config;
