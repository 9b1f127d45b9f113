//! Numerical laboratory for the radial Lane-Emden problem on the unit disk
//! and the associated nonlinear heat flow.
//!
//! The crate constructs the sign-changing radial stationary profiles with a
//! prescribed number of nodal regions, follows their rescaling limit toward
//! the entire Liouville solution, computes first eigenpairs of the linearized
//! radial operators, evaluates the blowup sign-test integrals, and simulates
//! the parabolic flow for initial data `lambda * u` to classify blowup
//! against global decay.

pub mod analysis;
mod dopri;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod liouville;
pub mod shooting;
pub mod spectral;
pub mod verification;

pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use shooting::{stationary_solution, StationarySolution, StepControl};
