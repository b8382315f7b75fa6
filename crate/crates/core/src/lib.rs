//! Quantum mutual entropy and channel capacities for finite-dimensional
//! systems.

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod cqc;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod mutual;
pub mod random;
pub mod search;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
