use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Field, Representation, SymbolSpec, Transverse};

/// Fraction of `‖φ‖²` allowed in the guard bands checked by [`rescale`].
const ESCAPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub lambda: f64,
    pub s: f64,
}

impl ScalingParams {
    pub fn new(lambda: f64, s: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self { lambda, s })
    }
}

/// Sobolev exponent left invariant by the `α`-scaling.
pub fn critical_index(alpha: f64) -> f64 {
    if alpha < 1.0 {
        (1.0 - alpha) / 2.0
    } else if alpha == 1.0 {
        0.0
    } else {
        (1.0 - alpha) / (2.0 * alpha)
    }
}

/// Anisotropic homogeneous norm with weight `(ξ² + |η|^{2α})^{s/2}`, which is
/// homogeneous of degree `s` under `(ξ, η) ↦ (λξ, λ^{1/α}η)`. The zero mode is
/// dropped when `s ≠ 0`.
pub fn homogeneous_sobolev_norm(u: &Field, s: f64, alpha: f64) -> f64 {
    let uh = u.to_spectral();
    let g = uh.grid();
    let (xi, eta) = (g.xi(), g.eta());
    let mut acc = 0.0;
    for ((i, l), c) in uh.data().indexed_iter() {
        let r2 = xi[i] * xi[i] + eta[l].abs().powf(2.0 * alpha);
        let w = if s == 0.0 {
            1.0
        } else if r2 == 0.0 {
            0.0
        } else {
            r2.powf(s)
        };
        acc += w * c.norm_sqr();
    }
    (acc * g.area()).sqrt()
}

fn band_fraction(u: &Field, outside: impl Fn(usize, usize) -> bool) -> f64 {
    let total: f64 = u.data().iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let band: f64 = u
        .data()
        .indexed_iter()
        .filter(|((i, l), _)| outside(*i, *l))
        .map(|(_, c)| c.norm_sqr())
        .sum();
    band / total
}

/// `u_λ(x, y) = λ φ(λx, λ^{1/α}y)` on a planar grid, resampled by evaluating the
/// trigonometric interpolant of `φ` at the stretched points.
///
/// Fails with [`Error::SupportEscapes`] when `φ` carries mass where the stretched
/// box leaves the original one, or spectral content the stretched grid cannot
/// resolve.
pub fn rescale(phi: &Field, params: ScalingParams, spec: &SymbolSpec) -> Result<Field> {
    let params = ScalingParams::new(params.lambda, params.s)?;
    let g = phi.grid().clone();
    if let Transverse::Torus = g.transverse() {
        return Err(Error::Unsupported(
            "rescale needs a planar grid (transverse line)".into(),
        ));
    }
    let lam = params.lambda;
    if lam == 1.0 {
        return Ok(phi.to_physical());
    }
    let lx_scale = lam;
    let ly_scale = lam.powf(1.0 / spec.alpha);
    let phys = phi.to_physical();
    let spec_field = phi.to_spectral();

    // φ is read as a function on the plane that vanishes outside the box, so it
    // must be negligible near the edges; a spread must also fit in the box.
    let (rx, ry) = (0.45 * g.lx() * lx_scale.min(1.0), 0.45 * g.ly() * ly_scale.min(1.0));
    let escaped = band_fraction(&phys, |i, l| g.x(i).abs() > rx || g.y(l).abs() > ry);
    if escaped > ESCAPE_TOL {
        return Err(Error::SupportEscapes(format!(
            "{escaped:.3e} of the mass lies outside |x| ≤ {rx:.4}, |y| ≤ {ry:.4}"
        )));
    }
    let kx = 0.9 * g.xi().iter().fold(0.0f64, |m, v| m.max(v.abs())) / lx_scale.max(1.0);
    let ky = 0.9 * g.eta().iter().fold(0.0f64, |m, v| m.max(v.abs())) / ly_scale.max(1.0);
    let (xi, eta) = (g.xi(), g.eta());
    let unresolved = band_fraction(&spec_field, |i, l| xi[i].abs() > kx || eta[l].abs() > ky);
    if unresolved > ESCAPE_TOL {
        return Err(Error::SupportEscapes(format!(
            "{unresolved:.3e} of the spectrum lies beyond the resolvable band after rescaling"
        )));
    }

    let (nx, ny) = g.shape();
    let inside = |z: f64, half: f64| if z.abs() <= half { 1.0 } else { 0.0 };
    let ex = Array2::from_shape_fn((nx, nx), |(i, j)| {
        let x = lx_scale * g.x(i);
        Complex64::from_polar(inside(x, 0.5 * g.lx()), xi[j] * x)
    });
    let ey = Array2::from_shape_fn((ny, ny), |(l, m)| {
        let y = ly_scale * g.y(l);
        Complex64::from_polar(inside(y, 0.5 * g.ly()), eta[m] * y)
    });
    let mut data = ex.dot(spec_field.data()).dot(&ey.t());
    data.mapv_inplace(|c| c * lam);
    Field::from_data(&g, Representation::Physical, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_index_branches() {
        assert_eq!(critical_index(1.0), 0.0);
        assert_eq!(critical_index(2.0), -0.25);
        assert_eq!(critical_index(0.5), 0.25);
        assert!((critical_index(1.0 + 1e-9)).abs() < 1e-9);
        assert!((critical_index(1.0 - 1e-9)).abs() < 1e-9);
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(ScalingParams::new(0.0, 0.0).is_err());
        assert!(ScalingParams::new(-1.0, 0.0).is_err());
    }
}
