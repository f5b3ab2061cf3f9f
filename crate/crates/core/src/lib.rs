pub mod circuit;
pub mod cli;
pub mod densesim;
pub mod error;
pub mod hamiltonian;
pub mod planner;
pub mod report;

pub use error::{Error, Result};
