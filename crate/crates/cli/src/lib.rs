//! Command-line and HTTP front ends for `revscope-core`.

pub mod commands;
pub mod config;
pub mod engine;
pub mod gateway;

pub use commands::{run, Cli};
pub use engine::{ApiError, Engine, ErrorCode, InlineAbstract, RankRequest};
