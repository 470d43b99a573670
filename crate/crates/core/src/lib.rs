//! Pseudospectral toolkit for the cubic Schrödinger equation with fractional
//! elliptic/hyperbolic dispersion `ω(ξ, n) = ξ² ± |n|^{2α}` on `ℝ × 𝕋`.

pub mod ensemble;
pub mod error;
pub mod inequality;
pub mod measure;
pub mod propagator;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
