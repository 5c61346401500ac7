//! Library side of the `sosgraph` command: the graph cache, table
//! rendering and the subcommands themselves.

pub mod cache;
pub mod commands;
pub mod table;
