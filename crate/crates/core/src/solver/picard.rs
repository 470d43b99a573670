use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimulationConfig;
use crate::error::{Error, Result};
use crate::propagator::{duhamel_trajectory, Propagator, Quadrature, TimeWindow};
use crate::spectral::{Field, Representation};

/// Upper bound on `Nt·Nx·Ny` stored by one Picard run (complex doubles).
pub const MAX_PICARD_SAMPLES: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub phi_norm: f64,
    /// `d_k = sup_t ‖u⁽ᵏ⁾(t) − u⁽ᵏ⁻¹⁾(t)‖₂` for `k = 1, 2, …`.
    pub distances: Vec<f64>,
    /// `d_{k+1}/d_k`.
    pub contraction_factors: Vec<f64>,
    /// `exp` of the least-squares slope of `ln d_k`; `None` with fewer than two
    /// positive distances.
    pub fitted_factor: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `sup_t ‖u − (U(t)φ − iν∫₀ᵗU(t−t′)|u|²u dt′)‖₂` recomputed at the final iterate.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// Final iterate at the window nodes, physical representation.
    pub trajectory: Vec<Field>,
    pub report: PicardReport,
}

struct Iteration<'a> {
    config: &'a SimulationConfig,
    window: &'a TimeWindow,
    free: Vec<Field>,
}

impl Iteration<'_> {
    /// `U(t)φ − iν D[|u|²u]` at every node, spectral.
    fn apply(&self, u: &[Field]) -> Result<Vec<Field>> {
        let nu = self.config.nu;
        if nu == 0.0 {
            return Ok(self.free.clone());
        }
        let forcing: Vec<Field> = u
            .iter()
            .map(|uk| {
                let mut p = uk.inverse()?;
                p.data_mut().par_mapv_inplace(|z| z * z.norm_sqr());
                p.forward()?.dealias(self.config.dealias)
            })
            .collect::<Result<_>>()?;
        let nodes = self.window.nodes();
        let d = duhamel_trajectory(&forcing, &nodes, &self.config.spec, Quadrature::Trapezoid)?;
        let c = Complex64::new(0.0, -nu);
        self.free.iter().zip(&d).map(|(f, dk)| f.axpy(c, dk)).collect()
    }
}

fn sup_distance(a: &[Field], b: &[Field]) -> Result<f64> {
    let mut sup = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        sup = sup.max(x.distance(y)?);
    }
    Ok(sup)
}

fn fit_factor(d: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, &v)| (k as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

/// Fixed-point iteration of `u = U(t)φ − iν∫₀ᵗ U(t−t′)|u|²u dt′` on the nodes of
/// `window` (which must contain `0`), starting from `u⁽⁰⁾ = U(t)φ`.
///
/// Stops once `d_k ≤ tol` or after `max_iter` iterations. Three consecutive
/// increases of `d_k` abort with [`Error::PicardDiverged`].
pub fn picard_iterate(
    phi: &Field,
    config: &SimulationConfig,
    window: &TimeWindow,
    max_iter: usize,
    tol: f64,
) -> Result<PicardOutcome> {
    config.validate()?;
    if !phi.grid().same_as(&config.grid) {
        return Err(Error::GridMismatch);
    }
    if !window.contains(0.0) {
        return Err(Error::InvalidParameter("the Picard window must contain t = 0".into()));
    }
    if window.nt.saturating_mul(config.grid.len()) > MAX_PICARD_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "Nt·Nx·Ny = {} exceeds the Picard storage cap {MAX_PICARD_SAMPLES}",
            window.nt * config.grid.len()
        )));
    }
    let nodes = window.nodes();
    nodes.index_of(0.0).ok_or(Error::OffGrid { t: 0.0 })?;
    let prop = Propagator::new(&config.grid, &config.spec);
    let phi_hat = phi.to_spectral();
    let free: Vec<Field> = nodes.times().iter().map(|&t| prop.apply(&phi_hat, t)).collect();
    let it = Iteration {
        config,
        window,
        free: free.clone(),
    };

    let mut u = free;
    let mut distances = Vec::new();
    let mut converged = false;
    for k in 1..=max_iter.max(1) {
        let next = it.apply(&u)?;
        let d = sup_distance(&next, &u)?;
        u = next;
        distances.push(d);
        if !d.is_finite() {
            return Err(Error::PicardDiverged {
                iteration: k,
                distance: d,
            });
        }
        if d <= tol {
            converged = true;
            break;
        }
        let n = distances.len();
        if n >= 4
            && distances[n - 1] > distances[n - 2]
            && distances[n - 2] > distances[n - 3]
            && distances[n - 3] > distances[n - 4]
        {
            return Err(Error::PicardDiverged {
                iteration: k,
                distance: d,
            });
        }
    }
    let residual = sup_distance(&it.apply(&u)?, &u)?;
    let contraction_factors = distances
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let report = PicardReport {
        phi_norm: phi.norm_l2(),
        fitted_factor: fit_factor(&distances),
        iterations: distances.len(),
        distances,
        contraction_factors,
        converged,
        residual,
    };
    let trajectory = u.iter().map(|f| f.inverse()).collect::<Result<Vec<_>>>()?;
    debug_assert!(trajectory
        .iter()
        .all(|f| f.representation() == Representation::Physical));
    Ok(PicardOutcome { trajectory, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fitted_factor_of_geometric_sequence() {
        let d: Vec<f64> = (0..6).map(|k| 0.3f64.powi(k) * 2.0).collect();
        assert!((fit_factor(&d).unwrap() - 0.3).abs() < 1e-12);
        assert!(fit_factor(&[1.0]).is_none());
        assert!(fit_factor(&[0.0, 0.0]).is_none());
    }
}
