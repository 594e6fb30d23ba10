//! Std companion to `cosmic-core`: file formats, report rendering, thread
//! pools, and the `cosmic` command line.

pub mod cli;
pub mod io;
pub mod parallel;
pub mod report;

pub use cosmic_core as core;
