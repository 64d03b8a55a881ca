//! Command-line tools, file formats and a thread-pool executor for
//! `sphere-gh-core`.

pub mod cache;
pub mod cli;
pub mod json;
pub mod parallel;
pub mod verify;
