//! Command-line and HTTP front ends for the `pcm-core` engine.

pub mod cli;
pub mod report;
pub mod server;
pub mod store;
