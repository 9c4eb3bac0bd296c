//! Stationary entanglement of two atoms driven by a squeezed cavity field.

pub mod cli;
pub mod control;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod physmodel;
pub mod qmat;

#[cfg(test)]
mod test_util;

pub use error::{Error, Result};
