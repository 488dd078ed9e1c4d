pub mod cli;
pub mod config;
pub mod drift;
pub mod ebm;
pub mod error;
pub mod features;
pub mod preprocess;
pub mod seed;
pub mod selection;
pub mod signal;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
