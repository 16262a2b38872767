//! Pseudo-spectral solvers for three-dimensional deep-water gravity waves.

pub mod dno;
pub mod envelope;
pub mod error;
pub mod fit;
pub mod harness;
pub mod euler3d;
pub mod integrator;
pub mod normalform;
pub mod reconstruct;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
