pub mod error;
pub mod cli;
pub mod forest;
pub mod identities;
pub mod permstat;
pub mod qpoly;
pub mod wreath;

pub use error::{Error, Result};
pub use qpoly::{IntPolynomial, Sign};
