pub mod bandit;
pub mod cli;
pub mod constraints;
pub mod copeland;
pub mod datasets;
pub mod error;
pub mod harness;
pub mod kl;
pub mod matrix;
pub mod solvers;

pub use error::{Error, Result};
