//! The linear group `U(t) = F⁻¹ e^{−itω} F` and the retarded Duhamel integral.

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{omega_table, Field, Representation, SymbolSpec};

/// Uniformly sampled time interval `[t0, t1]`, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl TimeWindow {
    pub fn new(t0: f64, t1: f64, nt: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "time window needs t1 > t0, got [{t0}, {t1}]"
            )));
        }
        if nt < 2 {
            return Err(Error::InvalidParameter(format!(
                "time window needs at least 2 samples, got {nt}"
            )));
        }
        Ok(Self { t0, t1, nt })
    }

    /// `I = [−δ, δ]`.
    pub fn symmetric(delta: f64, nt: usize) -> Result<Self> {
        Self::new(-delta, delta, nt)
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn nodes(&self) -> TimeNodes {
        TimeNodes::new(self.t0, self.length() / (self.nt - 1) as f64, self.nt)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t1
    }
}

/// `count` equally spaced instants `t0 + k·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeNodes {
    pub t0: f64,
    pub h: f64,
    pub count: usize,
}

impl TimeNodes {
    pub fn new(t0: f64, h: f64, count: usize) -> Self {
        Self { t0, h, count }
    }

    /// The k-th node; nodes within roundoff of zero are snapped to `0.0`.
    pub fn time(&self, k: usize) -> f64 {
        let t = self.t0 + k as f64 * self.h;
        if t.abs() <= 1e-12 * self.h.abs() * (self.count as f64) {
            0.0
        } else {
            t
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.time(k)).collect()
    }

    /// Index of the node at time `t`, if `t` is a node.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = ((t - self.t0) / self.h).round();
        if k < 0.0 || k >= self.count as f64 {
            return None;
        }
        let k = k as usize;
        ((self.t0 + k as f64 * self.h - t).abs() <= 1e-9 * self.h).then_some(k)
    }

    pub fn last(&self) -> f64 {
        self.time(self.count - 1)
    }
}

/// Composite rule used for the Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    /// Composite Simpson; a 3/8 panel closes odd interval counts.
    Simpson,
}

/// Weights for `∫_{x_0}^{x_m} g` over `m` unit intervals (scale by `h`).
pub fn composite_weights(m: usize, rule: Quadrature) -> Vec<f64> {
    let mut w = vec![0.0; m + 1];
    if m == 0 {
        return w;
    }
    if rule == Quadrature::Trapezoid || m == 1 {
        for v in w.iter_mut() {
            *v = 1.0;
        }
        w[0] = 0.5;
        w[m] = 0.5;
        return w;
    }
    let simpson_end = if m % 2 == 0 { m } else { m - 3 };
    for p in (0..simpson_end).step_by(2) {
        w[p] += 1.0 / 3.0;
        w[p + 1] += 4.0 / 3.0;
        w[p + 2] += 1.0 / 3.0;
    }
    if simpson_end < m {
        let s = simpson_end;
        w[s] += 3.0 / 8.0;
        w[s + 1] += 9.0 / 8.0;
        w[s + 2] += 9.0 / 8.0;
        w[s + 3] += 3.0 / 8.0;
    }
    w
}

fn phase_table(omega: &Array2<f64>, t: f64) -> Array2<Complex64> {
    omega.mapv(|w| Complex64::from_polar(1.0, -t * w))
}

/// `U(t)φ`: each coefficient multiplied by `e^{−itω(ξ,n)}`. The output keeps
/// the representation of the input; `t = 0` returns the input unchanged.
pub fn linear_propagate(phi: &Field, t: f64, spec: &SymbolSpec) -> Field {
    if t == 0.0 {
        return phi.clone();
    }
    let omega = omega_table(phi.grid(), spec);
    propagate_with(phi, &phase_table(&omega, t))
}

pub(crate) fn propagate_with(phi: &Field, phases: &Array2<Complex64>) -> Field {
    let mut spec_field = phi.to_spectral();
    Zip::from(spec_field.data_mut())
        .and(phases)
        .par_for_each(|c, p| *c *= p);
    match phi.representation() {
        Representation::Spectral => spec_field,
        Representation::Physical => spec_field.inverse().expect("spectral"),
    }
}

/// Precomputed multipliers for repeated propagation on one grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    omega: Array2<f64>,
}

impl Propagator {
    pub fn new(grid: &crate::spectral::Grid, spec: &SymbolSpec) -> Self {
        Self {
            omega: omega_table(grid, spec),
        }
    }

    pub fn omega(&self) -> &Array2<f64> {
        &self.omega
    }

    pub fn phases(&self, t: f64) -> Array2<Complex64> {
        phase_table(&self.omega, t)
    }

    pub fn apply(&self, phi: &Field, t: f64) -> Field {
        if t == 0.0 {
            return phi.clone();
        }
        propagate_with(phi, &self.phases(t))
    }
}

fn spectral_samples(forcing: &[Field]) -> Result<Vec<Array2<Complex64>>> {
    let first = forcing
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty forcing".into()))?;
    forcing
        .iter()
        .map(|f| {
            if !f.grid().same_as(first.grid()) {
                return Err(Error::GridMismatch);
            }
            Ok(f.to_spectral().into_data())
        })
        .collect()
}

fn wrap(like: &Field, data: Array2<Complex64>) -> Field {
    let out = Field::from_data(like.grid(), Representation::Spectral, data).expect("shape");
    match like.representation() {
        Representation::Spectral => out,
        Representation::Physical => out.inverse().expect("spectral"),
    }
}

/// `∫₀ᵗ U(t − t′) f(t′) dt′` by composite quadrature over the sample nodes of
/// `window`; both `0` and `t` must be nodes.
pub fn duhamel(forcing: &[Field], window: &TimeWindow, t: f64, spec: &SymbolSpec, rule: Quadrature) -> Result<Field> {
    if forcing.len() != window.nt {
        return Err(Error::InvalidParameter(format!(
            "forcing has {} samples, window has {}",
            forcing.len(),
            window.nt
        )));
    }
    if !window.contains(t) {
        return Err(Error::OutsideWindow {
            t,
            t0: window.t0,
            t1: window.t1,
        });
    }
    let nodes = window.nodes();
    let zero = nodes.index_of(0.0).ok_or(Error::OffGrid { t: 0.0 })?;
    let target = nodes.index_of(t).ok_or(Error::OffGrid { t })?;
    let samples = spectral_samples(forcing)?;
    let prop = Propagator::new(forcing[0].grid(), spec);
    let data = duhamel_at(&samples, &prop, &nodes, zero, target, rule);
    Ok(wrap(&forcing[0], data))
}

fn duhamel_at(
    samples: &[Array2<Complex64>],
    prop: &Propagator,
    nodes: &TimeNodes,
    zero: usize,
    target: usize,
    rule: Quadrature,
) -> Array2<Complex64> {
    let mut acc = Array2::<Complex64>::zeros(samples[0].dim());
    if zero == target {
        return acc;
    }
    let (lo, hi, sign) = if target > zero {
        (zero, target, 1.0)
    } else {
        (target, zero, -1.0)
    };
    let weights = composite_weights(hi - lo, rule);
    let tm = nodes.time(target);
    for (offset, w) in weights.iter().enumerate() {
        let k = lo + offset;
        let scale = sign * w * nodes.h;
        let lag = tm - nodes.time(k);
        Zip::from(&mut acc)
            .and(&samples[k])
            .and(prop.omega())
            .par_for_each(|a, &f, &om| {
                *a += f * Complex64::from_polar(scale, -lag * om);
            });
    }
    acc
}

/// The Duhamel integral at every node of `nodes` (which must include `0`).
///
/// The trapezoid rule uses the exact recursion
/// `D(t_{k+1}) = U(h)D(t_k) + (h/2)(U(h)f_k + f_{k+1})` and its mirror for
/// negative times; Simpson weights are applied per node.
pub fn duhamel_trajectory(
    forcing: &[Field],
    nodes: &TimeNodes,
    spec: &SymbolSpec,
    rule: Quadrature,
) -> Result<Vec<Field>> {
    if forcing.len() != nodes.count {
        return Err(Error::InvalidParameter(format!(
            "forcing has {} samples, time grid has {}",
            forcing.len(),
            nodes.count
        )));
    }
    let zero = nodes.index_of(0.0).ok_or(Error::OffGrid { t: 0.0 })?;
    let samples = spectral_samples(forcing)?;
    let prop = Propagator::new(forcing[0].grid(), spec);
    let out: Vec<Array2<Complex64>> = match rule {
        Quadrature::Trapezoid => trapezoid_recursion(&samples, &prop, nodes.h, zero),
        Quadrature::Simpson => {
            use rayon::prelude::*;
            (0..nodes.count)
                .into_par_iter()
                .map(|k| duhamel_at(&samples, &prop, nodes, zero, k, rule))
                .collect()
        }
    };
    Ok(out.into_iter().map(|d| wrap(&forcing[0], d)).collect())
}

fn trapezoid_recursion(
    samples: &[Array2<Complex64>],
    prop: &Propagator,
    h: f64,
    zero: usize,
) -> Vec<Array2<Complex64>> {
    let n = samples.len();
    let dim = samples[0].dim();
    let mut out = vec![Array2::<Complex64>::zeros(dim); n];
    let step = |prev: &Array2<Complex64>, f_prev: &Array2<Complex64>, f_next: &Array2<Complex64>, dt: f64| {
        let phase = prop.phases(dt);
        let mut next = Array2::<Complex64>::zeros(dim);
        Zip::from(&mut next)
            .and(prev)
            .and(f_prev)
            .and(f_next)
            .and(&phase)
            .par_for_each(|d, &p, &fp, &fnx, &ph| {
                *d = ph * p + 0.5 * dt * (ph * fp + fnx);
            });
        next
    };
    for k in zero..n.saturating_sub(1) {
        out[k + 1] = step(&out[k], &samples[k], &samples[k + 1], h);
    }
    for k in (1..=zero).rev() {
        out[k - 1] = step(&out[k], &samples[k], &samples[k - 1], -h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Sign};

    #[test]
    fn simpson_weights_integrate_cubics_exactly() {
        for m in 2..9 {
            let w = composite_weights(m, Quadrature::Simpson);
            let integral: f64 = w.iter().enumerate().map(|(k, wk)| wk * (k as f64).powi(3)).sum();
            let exact = (m as f64).powi(4) / 4.0;
            assert!((integral - exact).abs() < 1e-10 * exact, "m={m}");
        }
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let w = composite_weights(7, Quadrature::Trapezoid);
        assert_eq!(w.iter().sum::<f64>(), 7.0);
    }

    #[test]
    fn nodes_snap_zero() {
        let w = TimeWindow::symmetric(0.1, 21).unwrap();
        let nodes = w.nodes();
        assert_eq!(nodes.index_of(0.0), Some(10));
        assert_eq!(nodes.time(10), 0.0);
        assert_eq!(nodes.index_of(0.0123), None);
    }

    #[test]
    fn window_validation() {
        assert!(TimeWindow::new(1.0, 0.0, 4).is_err());
        assert!(TimeWindow::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn duhamel_rejects_bad_times() {
        let g = make_grid(4, 4, 1.0).unwrap();
        let spec = SymbolSpec::new(1.0, Sign::Elliptic).unwrap();
        let w = TimeWindow::new(0.0, 1.0, 5).unwrap();
        let f = vec![Field::zeros(&g, Representation::Physical); 5];
        assert!(matches!(
            duhamel(&f, &w, 1.5, &spec, Quadrature::Trapezoid),
            Err(Error::OutsideWindow { .. })
        ));
        assert!(matches!(
            duhamel(&f, &w, 0.3, &spec, Quadrature::Trapezoid),
            Err(Error::OffGrid { .. })
        ));
        let short = vec![Field::zeros(&g, Representation::Physical); 3];
        assert!(duhamel(&short, &w, 0.5, &spec, Quadrature::Trapezoid).is_err());
    }
}
