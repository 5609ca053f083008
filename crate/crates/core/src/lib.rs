//! Exact and approximate Foldy-Wouthuysen Hamiltonians on discretized Dirac models.

pub mod approx;
pub mod error;
pub mod exact;
pub mod fv;
pub mod lattice;
pub mod matfun;
pub mod matrix;
pub mod potential;

pub use error::{Error, Result};
pub use matrix::OperatorMatrix;
pub use lattice::{DiracModel, Grid, ModelSpec};
pub use potential::PotentialExpr;
