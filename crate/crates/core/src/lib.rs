//! Automatic offloading of function blocks to GPU libraries and FPGA IP cores.
//!
//! The pipeline parses a C translation unit, finds function blocks that a
//! pattern database can replace (by call name or by structural similarity),
//! rewrites the source for each offload pattern, and measures patterns to
//! pick the fastest one.

pub mod cli;
pub mod frontend;
pub mod loop_ga;
pub mod pattern_db;
pub mod replace;
pub mod similarity;
pub mod span;
pub mod verify;
