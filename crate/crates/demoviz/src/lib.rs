//! Command-line and HTTP front ends for `demoviz-core`.

pub mod api;
pub mod cli;
pub mod service;
