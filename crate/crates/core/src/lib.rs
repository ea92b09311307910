pub mod antisym;
pub mod clifford;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod field;
pub mod grid;
pub mod hamiltonian;
pub mod kron;
pub mod model;
pub mod operator;
pub mod probes;
pub mod report;
pub mod runner;
pub mod verify;

pub use error::{Error, Result};
