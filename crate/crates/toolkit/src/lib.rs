//! Formats, fixtures, oracle field generators and the `dms` command line
//! around [`dms_core`].

pub use dms_core;

pub mod cli;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod formats;
pub mod generate;
pub mod report;
