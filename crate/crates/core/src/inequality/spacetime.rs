//! Fields sampled over a time window, with the window treated as a time torus.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Array3, Axis, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{Propagator, TimeNodes, TimeWindow};
use crate::spectral::fft::{signed_index, transform_axis, PlanPair};
use crate::spectral::{omega_table, Field, Grid, Representation, SymbolSpec};

/// `Nt × Nx × Ny` samples of `u(t, x, y)` at `t_k = t0 + k·(t1 − t0)/Nt`,
/// `k = 0, …, Nt − 1`, or its coefficients at `(τ_m; ξ_j, n)` with
/// `τ_m = 2πm/(t1 − t0)`.
///
/// The forward transform is normalized like the spatial one, so that
/// `u(t_k) = Σ_m û(τ_m) e^{iτ_m t_k}` and a constant has coefficient 1.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: Arc<Grid>,
    window: TimeWindow,
    repr: Representation,
    data: Array3<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: &Arc<Grid>, window: &TimeWindow, repr: Representation) -> Self {
        Self {
            grid: Arc::clone(grid),
            window: *window,
            repr,
            data: Array3::zeros((window.nt, grid.nx(), grid.ny())),
        }
    }

    pub fn from_data(
        grid: &Arc<Grid>,
        window: &TimeWindow,
        repr: Representation,
        data: Array3<Complex64>,
    ) -> Result<Self> {
        let want = (window.nt, grid.nx(), grid.ny());
        if data.dim() != want {
            return Err(Error::InvalidParameter(format!(
                "space-time data has shape {:?}, expected {want:?}",
                data.dim()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            window: *window,
            repr,
            data: data.as_standard_layout().into_owned(),
        })
    }

    /// Physical samples of `f(t, x, y)`.
    pub fn from_fn<F>(grid: &Arc<Grid>, window: &TimeWindow, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> Complex64,
    {
        let h = window.length() / window.nt as f64;
        let data = Array3::from_shape_fn((window.nt, grid.nx(), grid.ny()), |(k, i, l)| {
            f(window.t0 + k as f64 * h, grid.x(i), grid.y(l))
        });
        Self {
            grid: Arc::clone(grid),
            window: *window,
            repr: Representation::Physical,
            data,
        }
    }

    /// Stack spatial fields, one per sample time, into a physical space-time field.
    pub fn from_slices(window: &TimeWindow, slices: &[Field]) -> Result<Self> {
        if slices.len() != window.nt {
            return Err(Error::InvalidParameter(format!(
                "{} slices for a window with {} samples",
                slices.len(),
                window.nt
            )));
        }
        let grid = Arc::clone(slices[0].grid());
        let mut data = Array3::zeros((window.nt, grid.nx(), grid.ny()));
        for (mut dst, f) in data.axis_iter_mut(Axis(0)).zip(slices) {
            if !f.grid().same_as(&grid) {
                return Err(Error::GridMismatch);
            }
            dst.assign(f.to_physical().data());
        }
        Ok(Self {
            grid,
            window: *window,
            repr: Representation::Physical,
            data,
        })
    }

    /// `U(t_k)φ` at every sample time.
    pub fn free_wave(phi: &Field, window: &TimeWindow, spec: &SymbolSpec) -> Self {
        let prop = Propagator::new(phi.grid(), spec);
        let phi = phi.to_spectral();
        let slices: Vec<Field> = sample_times(window)
            .into_iter()
            .map(|t| prop.apply(&phi, t).to_physical())
            .collect();
        Self::from_slices(window, &slices).expect("consistent slices")
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn window(&self) -> &TimeWindow {
        &self.window
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn data(&self) -> &Array3<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.data
    }

    pub fn nt(&self) -> usize {
        self.window.nt
    }

    pub fn time_step(&self) -> f64 {
        self.window.length() / self.window.nt as f64
    }

    /// Sample instants `t_k`.
    pub fn times(&self) -> Vec<f64> {
        sample_times(&self.window)
    }

    /// The sample instants as Duhamel nodes.
    pub fn time_nodes(&self) -> TimeNodes {
        TimeNodes::new(self.window.t0, self.time_step(), self.window.nt)
    }

    /// `τ_m` in FFT order.
    pub fn tau(&self) -> Vec<f64> {
        let nt = self.window.nt;
        let dtau = 2.0 * PI / self.window.length();
        (0..nt).map(|m| dtau * signed_index(m, nt) as f64).collect()
    }

    /// Period of the discrete `τ` axis, `2πNt/(t1 − t0)`.
    pub fn tau_period(&self) -> f64 {
        2.0 * PI * self.window.nt as f64 / self.window.length()
    }

    /// Measure of the space-time box.
    pub fn volume(&self) -> f64 {
        self.window.length() * self.grid.area()
    }

    /// `τ_m + ω(ξ_j, n)`, folded into `[−P/2, P/2)` with `P` the `τ` period.
    pub fn modulation(&self, spec: &SymbolSpec) -> Array3<f64> {
        let omega = omega_table(&self.grid, spec);
        let tau = self.tau();
        let p = self.tau_period();
        Array3::from_shape_fn(self.data.dim(), |(m, i, l)| fold(tau[m] + omega[[i, l]], p))
    }

    pub(crate) fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::RepresentationMismatch {
                expected: repr,
                found: self.repr,
            });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &SpaceTimeField) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.window != other.window {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Physical → spectral.
    pub fn forward(&self) -> Result<Self> {
        self.expect(Representation::Physical)?;
        let g = &*self.grid;
        let nt = self.window.nt;
        let mut data = self.data.clone();
        transform_axis(&mut data, 2, &g.plan_y.forward);
        transform_axis(&mut data, 1, &g.plan_x.forward);
        transform_axis(&mut data, 0, &PlanPair::new(nt).forward);
        let norm = 1.0 / (nt * g.len()) as f64;
        let (sx, sy) = (g.shift_x(), g.shift_y());
        let st = self.time_shift();
        Zip::indexed(&mut data).par_for_each(|(m, i, l), c| *c *= st[m] * sx[i] * sy[l] * norm);
        Ok(Self {
            grid: Arc::clone(&self.grid),
            window: self.window,
            repr: Representation::Spectral,
            data,
        })
    }

    /// Spectral → physical.
    pub fn inverse(&self) -> Result<Self> {
        self.expect(Representation::Spectral)?;
        let g = &*self.grid;
        let (sx, sy) = (g.shift_x(), g.shift_y());
        let st = self.time_shift();
        let mut data = self.data.clone();
        Zip::indexed(&mut data).par_for_each(|(m, i, l), c| *c *= (st[m] * sx[i] * sy[l]).conj());
        transform_axis(&mut data, 0, &PlanPair::new(self.window.nt).inverse);
        transform_axis(&mut data, 1, &g.plan_x.inverse);
        transform_axis(&mut data, 2, &g.plan_y.inverse);
        Ok(Self {
            grid: Arc::clone(&self.grid),
            window: self.window,
            repr: Representation::Physical,
            data,
        })
    }

    // e^{−iτ_m t0}
    fn time_shift(&self) -> Vec<Complex64> {
        let t0 = self.window.t0;
        self.tau()
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -t * t0))
            .collect()
    }

    pub fn to_physical(&self) -> Self {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Spectral => self.inverse().expect("spectral"),
        }
    }

    pub fn to_spectral(&self) -> Self {
        match self.repr {
            Representation::Spectral => self.clone(),
            Representation::Physical => self.forward().expect("physical"),
        }
    }

    /// Spatial field at sample `k`, physical.
    pub fn slice(&self, k: usize) -> Field {
        let phys = self.to_physical();
        let data: Array2<Complex64> = phys.data.index_axis(Axis(0), k).to_owned();
        Field::from_data(&self.grid, Representation::Physical, data).expect("shape")
    }

    pub fn slices(&self) -> Vec<Field> {
        let phys = self.to_physical();
        phys.data
            .axis_iter(Axis(0))
            .map(|s| Field::from_data(&self.grid, Representation::Physical, s.to_owned()).expect("shape"))
            .collect()
    }

    /// Discrete space-time `‖u‖²_{L²}` in either representation.
    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self.data.iter().map(|c| c.norm_sqr()).sum();
        match self.repr {
            Representation::Physical => s * self.time_step() * self.grid.cell_area(),
            Representation::Spectral => s * self.volume(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.data.mapv_inplace(|v| v * c);
        out
    }

    /// `self + other`, in the representation of `self`.
    pub fn add(&self, other: &SpaceTimeField) -> Result<Self> {
        self.check_compatible(other)?;
        let other = match self.repr {
            Representation::Physical => other.to_physical(),
            Representation::Spectral => other.to_spectral(),
        };
        let mut out = self.clone();
        Zip::from(&mut out.data).and(&other.data).for_each(|a, &b| *a += b);
        Ok(out)
    }

    /// Pointwise product of the physical samples.
    pub fn product(&self, other: &SpaceTimeField) -> Result<Self> {
        self.check_compatible(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let mut out = a;
        Zip::from(&mut out.data).and(&b.data).par_for_each(|x, &y| *x *= y);
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == Complex64::default())
    }
}

/// `t_k = t0 + k·(t1 − t0)/Nt`, `k < Nt`.
pub fn sample_times(window: &TimeWindow) -> Vec<f64> {
    TimeNodes::new(window.t0, window.length() / window.nt as f64, window.nt).times()
}

/// `x` reduced modulo `p` into `[−p/2, p/2)`.
#[inline]
pub(crate) fn fold(x: f64, p: f64) -> f64 {
    if (-0.5 * p..0.5 * p).contains(&x) {
        return x;
    }
    let r = x - p * ((x + 0.5 * p) / p).floor();
    if r >= 0.5 * p {
        r - p
    } else {
        r
    }
}
