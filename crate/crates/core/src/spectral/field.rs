use std::sync::Arc;

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::transform_axis;
use super::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Physical,
    Spectral,
}

/// Spectral truncation applied after pointwise products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealiasRule {
    /// No truncation.
    Off,
    /// Keep `|j| ≤ N/3`.
    #[default]
    TwoThirds,
    /// Keep `|j| ≤ N/4`.
    Half,
}

impl DealiasRule {
    pub fn fraction(self) -> Option<f64> {
        match self {
            DealiasRule::Off => None,
            DealiasRule::TwoThirds => Some(2.0 / 3.0),
            DealiasRule::Half => Some(0.5),
        }
    }

    /// Whether signed mode `j` of a length-`n` axis survives the rule.
    pub fn keeps(self, j: i64, n: usize) -> bool {
        match self.fraction() {
            None => true,
            Some(r) => (j.unsigned_abs() as f64) <= r * (n as f64) / 2.0,
        }
    }
}

/// Complex double-precision field on a [`Grid`].
///
/// Forward transforms carry the `1/(Nx·Ny)` factor and the phase of the box
/// origin, so a coefficient is the box average of `u·e^{−i(ξx+ηy)}`; the
/// constant field `1` has coefficient `1` at the zero mode and
/// `Σ|u|²·dx·dy = Lx·Ly·Σ|û|²`.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    repr: Representation,
    data: Array2<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>, repr: Representation) -> Self {
        Self {
            grid: Arc::clone(grid),
            repr,
            data: Array2::zeros(grid.shape()),
        }
    }

    pub fn from_data(grid: &Arc<Grid>, repr: Representation, data: Array2<Complex64>) -> Result<Self> {
        if data.dim() != grid.shape() {
            return Err(Error::InvalidGrid(format!(
                "data shape {:?} does not match grid {:?}",
                data.dim(),
                grid.shape()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            repr,
            data: data.as_standard_layout().into_owned(),
        })
    }

    /// Samples `f(x, y)` at the grid points.
    pub fn from_fn<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let data = Array2::from_shape_fn(grid.shape(), |(i, l)| f(grid.x(i), grid.y(l)));
        Self {
            grid: Arc::clone(grid),
            repr: Representation::Physical,
            data,
        }
    }

    /// Spectral field with coefficient `f(ξ, η)` at each grid frequency.
    pub fn from_spectrum<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let (xi, eta) = (grid.xi(), grid.eta());
        let data = Array2::from_shape_fn(grid.shape(), |(i, l)| f(xi[i], eta[l]));
        Self {
            grid: Arc::clone(grid),
            repr: Representation::Spectral,
            data,
        }
    }

    /// The plane wave `a·e^{i(ξ_j x + η_n y)}` for signed mode indices `(j, n)`.
    pub fn plane_wave(grid: &Arc<Grid>, j: i64, n: i64, amplitude: Complex64) -> Result<Self> {
        let (i, l) = match (grid.index_of_mode_x(j), grid.index_of_mode_y(n)) {
            (Some(i), Some(l)) => (i, l),
            _ => return Err(Error::InvalidParameter(format!("mode ({j}, {n}) is not on the grid"))),
        };
        let (xi, eta) = (grid.xi()[i], grid.eta()[l]);
        Ok(Self::from_fn(grid, |x, y| {
            amplitude * Complex64::from_polar(1.0, xi * x + eta * y)
        }))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array2<Complex64> {
        self.data
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

    pub(crate) fn check_compatible(&self, other: &Field) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.repr != other.repr {
            return Err(Error::RepresentationMismatch {
                expected: self.repr,
                found: other.repr,
            });
        }
        Ok(())
    }

    /// Physical → spectral.
    pub fn forward(&self) -> Result<Field> {
        self.expect(Representation::Physical)?;
        let g = &*self.grid;
        let mut data = self.data.clone();
        transform_axis(&mut data, 1, &g.plan_y.forward);
        transform_axis(&mut data, 0, &g.plan_x.forward);
        let norm = 1.0 / g.len() as f64;
        let (sx, sy) = (g.shift_x(), g.shift_y());
        Zip::indexed(&mut data).par_for_each(|(i, l), c| *c *= sx[i] * sy[l] * norm);
        Ok(Field {
            grid: Arc::clone(&self.grid),
            repr: Representation::Spectral,
            data,
        })
    }

    /// Spectral → physical.
    pub fn inverse(&self) -> Result<Field> {
        self.expect(Representation::Spectral)?;
        let g = &*self.grid;
        let (sx, sy) = (g.shift_x(), g.shift_y());
        let mut data = self.data.clone();
        Zip::indexed(&mut data).par_for_each(|(i, l), c| *c *= (sx[i] * sy[l]).conj());
        transform_axis(&mut data, 0, &g.plan_x.inverse);
        transform_axis(&mut data, 1, &g.plan_y.inverse);
        Ok(Field {
            grid: Arc::clone(&self.grid),
            repr: Representation::Physical,
            data,
        })
    }

    pub fn to_physical(&self) -> Field {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Spectral => self.inverse().expect("spectral"),
        }
    }

    pub fn to_spectral(&self) -> Field {
        match self.repr {
            Representation::Spectral => self.clone(),
            Representation::Physical => self.forward().expect("physical"),
        }
    }

    /// Discrete `‖u‖²_{L²}` in either representation.
    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self.data.iter().map(|c| c.norm_sqr()).sum();
        match self.repr {
            Representation::Physical => s * self.grid.cell_area(),
            Representation::Spectral => s * self.grid.area(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Spatial `L^p` norm by the cell-measure quadrature.
    pub fn norm_lp(&self, p: f64) -> f64 {
        let phys = self.to_physical();
        let s: f64 = phys.data.iter().map(|c| c.norm().powf(p)).sum();
        (s * self.grid.cell_area()).powf(1.0 / p)
    }

    /// `‖self − other‖_{L²}`.
    pub fn distance(&self, other: &Field) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = Zip::from(&self.data)
            .and(&other.data)
            .fold(0.0, |acc, a, b| acc + (a - b).norm_sqr());
        let w = match self.repr {
            Representation::Physical => self.grid.cell_area(),
            Representation::Spectral => self.grid.area(),
        };
        Ok((s * w).sqrt())
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.data.mapv_inplace(|v| v * c);
        out
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        Zip::from(&mut out.data).and(&other.data).for_each(|a, &b| *a += c * b);
        Ok(out)
    }

    /// Multiply each coefficient by `m(ξ, η)`.
    pub fn apply_multiplier<F>(&self, m: F) -> Result<Field>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        self.expect(Representation::Spectral)?;
        let (xi, eta) = (self.grid.xi(), self.grid.eta());
        let mut out = self.clone();
        Zip::indexed(&mut out.data).par_for_each(|(i, l), c| *c *= m(xi[i], eta[l]));
        Ok(out)
    }

    /// Zero the coefficients outside the retained block of `rule`.
    pub fn dealias(&self, rule: DealiasRule) -> Result<Field> {
        self.expect(Representation::Spectral)?;
        let mut out = self.clone();
        dealias_in_place(&self.grid, &mut out.data, rule);
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

pub(crate) fn dealias_in_place(grid: &Grid, data: &mut Array2<Complex64>, rule: DealiasRule) {
    if rule == DealiasRule::Off {
        return;
    }
    let (nx, ny) = grid.shape();
    for (i, mut row) in data.axis_iter_mut(Axis(0)).enumerate() {
        let keep_x = rule.keeps(grid.mode_x(i), nx);
        for (l, c) in row.iter_mut().enumerate() {
            if !keep_x || !rule.keeps(grid.mode_y(l), ny) {
                *c = Complex64::default();
            }
        }
    }
}

/// Free-function forms mirroring the operation names.
pub fn forward(u: &Field) -> Result<Field> {
    u.forward()
}

pub fn inverse(u: &Field) -> Result<Field> {
    u.inverse()
}

pub fn dealias(u: &Field, rule: DealiasRule) -> Result<Field> {
    u.dealias(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_field_has_unit_zero_mode() {
        let g = make_grid(16, 8, 5.0).unwrap();
        let u = Field::from_fn(&g, |_, _| c(1.0));
        let uh = u.forward().unwrap();
        assert!((uh.data()[[0, 0]] - c(1.0)).norm() < 1e-15);
        let others: f64 = uh.data().iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
        assert!(others <= 1e-13);
    }

    #[test]
    fn plane_wave_is_one_coefficient() {
        let g = make_grid(16, 8, 3.0 * PI).unwrap();
        let a = Complex64::new(0.3, -0.7);
        let u = Field::plane_wave(&g, -3, 2, a).unwrap();
        let uh = u.forward().unwrap();
        let (i, l) = (g.index_of_mode_x(-3).unwrap(), g.index_of_mode_y(2).unwrap());
        for ((p, q), z) in uh.data().indexed_iter() {
            if (p, q) == (i, l) {
                assert!((z - a).norm() < 1e-14);
            } else {
                assert!(z.norm() < 1e-14, "stray coefficient at {:?}", (p, q));
            }
        }
    }

    #[test]
    fn representation_mismatch_is_an_error() {
        let g = make_grid(4, 4, 1.0).unwrap();
        let u = Field::zeros(&g, Representation::Spectral);
        assert!(matches!(u.forward(), Err(Error::RepresentationMismatch { .. })));
        let v = Field::zeros(&g, Representation::Physical);
        assert!(v.inverse().is_err());
        assert!(v.dealias(DealiasRule::Half).is_err());
    }

    #[test]
    fn dealias_half_kills_high_mode() {
        let g = make_grid(16, 16, 1.0).unwrap();
        let u = Field::plane_wave(&g, 7, 0, c(1.0)).unwrap().forward().unwrap();
        let d = u.dealias(DealiasRule::Half).unwrap();
        assert!(d.data().iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn dealias_keeps_retained_block_and_is_idempotent() {
        let g = make_grid(12, 12, 2.0).unwrap();
        let u = Field::from_spectrum(&g, |xi, eta| Complex64::new(xi.cos(), eta));
        let inside = u
            .apply_multiplier(|xi, eta| {
                let j = (xi * 2.0 / (2.0 * PI)).round().abs();
                if j <= 4.0 && eta.abs() <= 4.0 {
                    c(1.0)
                } else {
                    c(0.0)
                }
            })
            .unwrap();
        let d = inside.dealias(DealiasRule::TwoThirds).unwrap();
        assert_eq!(d.data(), inside.data());
        let once = u.dealias(DealiasRule::TwoThirds).unwrap();
        let twice = once.dealias(DealiasRule::TwoThirds).unwrap();
        assert_eq!(once.data(), twice.data());
    }
}
