//! Exact computation with rational maps of the Riemann sphere: deck groups of
//! iterates, recovery of critical data from an iterate, shared iterates, and
//! rendering of the associated dynamical pictures.

pub mod algebra;
pub mod deck;
pub mod detect;
pub mod dynren;
pub mod error;
pub mod mobius;
pub mod ratmap;
pub mod sample;

pub use error::{Error, Result};
