pub mod analysis;
pub mod coloring;
pub mod error;
pub mod harness;
pub mod pauli;
pub mod protocols;
pub mod quantum;
pub mod rng;
pub mod stabilizer;

pub use error::{Error, Result};
