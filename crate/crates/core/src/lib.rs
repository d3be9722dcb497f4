pub mod arith;
pub mod autbound;
pub mod cdgraph;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod quaternion;
pub mod shimura;

pub use error::{Error, Result};
