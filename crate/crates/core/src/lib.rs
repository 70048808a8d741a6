//! Lax matrices with an r-matrix Poisson structure, their spectral curves,
//! separated variables, reconstruction from a divisor, and the graded
//! characters of the associated complex.

pub mod algebra;
pub mod cli;
pub mod curve;
pub mod error;
pub mod euler;
pub mod lax;
pub mod poisson;
pub mod reconstruct;
pub mod sov;

pub use error::{Error, Result};
