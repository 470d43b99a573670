use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{signed_index, PlanPair};
use crate::error::{Error, Result};

/// Interpretation of the second (y) direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Transverse {
    /// `𝕋 = ℝ/2π𝕫`: integer frequencies, `y ∈ [0, 2π)`.
    Torus,
    /// A second truncated line `[−Ly/2, Ly/2)` with frequencies `(2π/Ly)𝕫`.
    Line { ly: f64 },
}

/// Uniform discretization of the cylinder (truncated line × torus), or of the
/// plane when the transverse direction is a [`Transverse::Line`].
///
/// Storage is row-major with the y index contiguous; spectral arrays use FFT
/// ordering along both axes. Grids are immutable once built.
#[derive(Debug)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    transverse: Transverse,
    ly: f64,
    x0: f64,
    y0: f64,
    xi: Vec<f64>,
    eta: Vec<f64>,
    jx: Vec<i64>,
    jy: Vec<i64>,
    shift_x: Vec<Complex64>,
    shift_y: Vec<Complex64>,
    pub(crate) plan_x: PlanPair,
    pub(crate) plan_y: PlanPair,
}

fn check_size(name: &str, n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "{name} must be even and at least 4, got {n}"
        )));
    }
    Ok(())
}

fn check_length(name: &str, l: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "{name} must be positive and finite, got {l}"
        )));
    }
    Ok(())
}

/// `nx × ny` cylinder grid with the line truncated to `[−lx/2, lx/2)`.
pub fn make_grid(nx: usize, ny: usize, lx: f64) -> Result<Arc<Grid>> {
    Grid::cylinder(nx, ny, lx)
}

impl Grid {
    pub fn cylinder(nx: usize, ny: usize, lx: f64) -> Result<Arc<Self>> {
        Self::build(nx, ny, lx, Transverse::Torus)
    }

    pub fn planar(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>> {
        check_length("Ly", ly)?;
        Self::build(nx, ny, lx, Transverse::Line { ly })
    }

    fn build(nx: usize, ny: usize, lx: f64, transverse: Transverse) -> Result<Arc<Self>> {
        check_size("Nx", nx)?;
        check_size("Ny", ny)?;
        check_length("Lx", lx)?;
        let (ly, y0) = match transverse {
            Transverse::Torus => (2.0 * PI, 0.0),
            Transverse::Line { ly } => (ly, -0.5 * ly),
        };
        let x0 = -0.5 * lx;
        let jx: Vec<i64> = (0..nx).map(|i| signed_index(i, nx)).collect();
        let jy: Vec<i64> = (0..ny).map(|i| signed_index(i, ny)).collect();
        let kx = 2.0 * PI / lx;
        let xi: Vec<f64> = jx.iter().map(|&j| kx * j as f64).collect();
        let eta: Vec<f64> = match transverse {
            Transverse::Torus => jy.iter().map(|&n| n as f64).collect(),
            Transverse::Line { ly } => {
                let ky = 2.0 * PI / ly;
                jy.iter().map(|&n| ky * n as f64).collect()
            }
        };
        // e^{-i ξ x0}: makes coefficients those of the continuous transform on the box.
        let shift_x = xi.iter().map(|&k| Complex64::from_polar(1.0, -k * x0)).collect();
        let shift_y = eta.iter().map(|&k| Complex64::from_polar(1.0, -k * y0)).collect();
        Ok(Arc::new(Self {
            nx,
            ny,
            lx,
            transverse,
            ly,
            x0,
            y0,
            xi,
            eta,
            jx,
            jy,
            shift_x,
            shift_y,
            plan_x: PlanPair::new(nx),
            plan_y: PlanPair::new(ny),
        }))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    /// Period of the transverse direction (`2π` on the torus).
    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn transverse(&self) -> Transverse {
        self.transverse
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.transverse, Transverse::Torus)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx()
    }

    pub fn y(&self, l: usize) -> f64 {
        self.y0 + l as f64 * self.dy()
    }

    /// Line frequencies `ξ_j = 2πj/Lx` in FFT order.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Transverse frequencies in FFT order (integers `n` on the torus).
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Signed line mode index `j` for FFT position `i`.
    pub fn mode_x(&self, i: usize) -> i64 {
        self.jx[i]
    }

    /// Signed transverse mode index (`n` on the torus) for FFT position `l`.
    pub fn mode_y(&self, l: usize) -> i64 {
        self.jy[l]
    }

    /// FFT position of signed line mode `j`, if it is on the grid.
    pub fn index_of_mode_x(&self, j: i64) -> Option<usize> {
        mode_position(j, self.nx)
    }

    /// FFT position of signed transverse mode `n`, if it is on the grid.
    pub fn index_of_mode_y(&self, n: i64) -> Option<usize> {
        mode_position(n, self.ny)
    }

    pub(crate) fn shift_x(&self) -> &[Complex64] {
        &self.shift_x
    }

    pub(crate) fn shift_y(&self) -> &[Complex64] {
        &self.shift_y
    }

    /// True when both grids describe the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.transverse == other.transverse
    }
}

fn mode_position(j: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if j < -half || j >= n as i64 - half {
        return None;
    }
    Some(if j >= 0 { j as usize } else { (j + n as i64) as usize })
}
