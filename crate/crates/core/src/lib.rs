//! Adaptive finite sections for random tridiagonal operators.

pub mod cli;
pub mod error;
pub mod fredholm;
pub mod fsm;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod pseudoergodic;
pub mod spectra;
pub mod symbol_sets;

pub use error::{Error, Result};
