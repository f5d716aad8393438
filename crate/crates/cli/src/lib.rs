//! Command-line front end for `nestprox`: run files, solve and compare
//! pipelines, instance verification.

pub mod args;
pub mod run;
pub mod spec;

pub use args::{execute, Cli};
