//! Discretization of the cylinder, Fourier transforms and the dispersion symbol.

pub(crate) mod fft;
pub(crate) mod field;
mod grid;
pub mod snapshot;
mod symbol;

pub use field::{dealias, forward, inverse, DealiasRule, Field, Representation};
pub use grid::{make_grid, Grid, Transverse};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, Snapshot};
pub use symbol::{dispersion, Sign, SymbolSpec};

use ndarray::Array2;

/// Table of `ω(ξ, η)` over the grid frequencies in storage order.
pub fn omega_table(grid: &Grid, spec: &SymbolSpec) -> Array2<f64> {
    let (xi, eta) = (grid.xi(), grid.eta());
    let frac: Vec<f64> = eta
        .iter()
        .map(|&e| spec.sign.factor() * spec.fractional_part(e))
        .collect();
    Array2::from_shape_fn(grid.shape(), |(i, l)| xi[i] * xi[i] + frac[l])
}
