pub mod cli;
pub mod entropy;
pub mod error;
pub mod graphs;
pub mod implicit;
pub mod matcore;
pub mod pauli;
pub mod project;
pub mod rng;
pub mod samplers;
pub mod toric;

pub use error::{Error, Result};
