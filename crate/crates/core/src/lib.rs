#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Gaussian analytic functions: sampling, zero sets, weighted Bergman and
//! Fock norms, and Monte Carlo checks of the associated inequalities.

pub(crate) mod descriptor;
pub mod analysis;
pub mod coeffs;
pub mod error;
pub mod gaf;
pub mod measure;
pub mod montecarlo;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod suite;
pub mod zeros;

pub use error::{Error, Result};
