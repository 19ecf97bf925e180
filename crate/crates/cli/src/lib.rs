//! Library surface of the `qkdrate` command-line tool: configuration,
//! protocol evaluation, sweep engine and SVG plotting.

pub mod config;
pub mod protocol;
pub mod svg;
pub mod sweep;
