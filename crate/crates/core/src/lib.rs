//! Counting cubic fields by the root height of a defining polynomial.

pub mod arith;
pub mod census;
pub mod archimedean;
pub mod densities;
pub mod error;
pub mod exec;
pub mod index;
pub mod poly;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
