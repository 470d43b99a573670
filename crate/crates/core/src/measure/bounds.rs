use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;

const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofBounds {
    pub alpha: f64,
    pub c: f64,
    pub k: f64,
    /// `∫_{C^{1/2α}}^{(C+K)^{1/2α}} √(z^{2α} − C) dz`.
    pub j1: f64,
    /// `K/α` for `C ≥ 1`, `√K (C+K)^{1/2α}` for `C < 1`.
    pub j1_bound: f64,
    /// `∫_{(C+K)^{1/2α}}^∞ K/√(z^{2α} − C) dz`.
    pub j2: f64,
    /// `c(α)·K`.
    pub j2_bound: f64,
    pub c_alpha: f64,
    pub pass: bool,
}

/// `c(α) = √2 + (2/√3)·2^{1/α−1}·α/(α−1)`: the explicit value of
/// `∫₁² dρ/(√2·√(ρ−1)) + ∫₂^∞ (2/√3) ρ^{1/α−2} dρ`, which majorizes
/// `∫₁^∞ ρ^{1/α−1}/√(ρ²−1) dρ` using `√(ρ+1)·ρ^{1−1/α} ≥ √2` on `[1, 2]` and
/// `√(ρ²−1) ≥ (√3/2)ρ` on `[2, ∞)`.
pub fn j2_majorant_constant(alpha: f64) -> f64 {
    std::f64::consts::SQRT_2 + 2.0 / 3f64.sqrt() * 2f64.powf(1.0 / alpha - 1.0) * alpha / (alpha - 1.0)
}

/// Quadrature values of the two integrals in the − branch estimate and their
/// analytic bounds.
///
/// `J1` uses `z^{2α} = C + v²`, giving the smooth integrand
/// `(v²/α)(C+v²)^{1/2α − 1}` on `[0, √K]`. `J2` uses `z = C^{1/2α}ρ^{1/α}`,
/// then `ρ = 1/s` and `s = w^{α/(α−1)}`, which leaves
/// `(K/α) C^{1/2α − 1/2} · p ∫₀^{w₁} (1 − w^{2p})^{−1/2} dw` with `p = α/(α−1)` and
/// `w₁ = ((C+K)/C)^{−1/(2p)} < 1`.
pub fn proof_bounds(alpha: f64, c: f64, k: f64) -> Result<ProofBounds> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("K must be at least 1, got {k}")));
    }
    let e = 1.0 / (2.0 * alpha);
    let j1 = integrate(
        |v| v * v / alpha * (c + v * v).powf(e - 1.0),
        0.0,
        k.sqrt(),
        ABS_TOL,
        REL_TOL,
        MAX_INTERVALS,
    )?
    .value;
    let j1_bound = if c >= 1.0 {
        k / alpha
    } else {
        k.sqrt() * (c + k).powf(e)
    };

    let p = alpha / (alpha - 1.0);
    let w1 = ((c + k) / c).powf(-0.5 / p);
    let inner = integrate(
        |w: f64| p / (1.0 - w.powf(2.0 * p)).sqrt(),
        0.0,
        w1,
        ABS_TOL,
        REL_TOL,
        MAX_INTERVALS,
    )?
    .value;
    let j2 = k / alpha * c.powf(e - 0.5) * inner;
    let c_alpha = j2_majorant_constant(alpha);
    let j2_bound = c_alpha * k;
    Ok(ProofBounds {
        alpha,
        c,
        k,
        j1,
        j1_bound,
        j2,
        j2_bound,
        c_alpha,
        pass: j1 <= j1_bound && j2 <= j2_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        assert!(proof_bounds(1.0, 1.0, 1.0).is_err());
        assert!(proof_bounds(2.0, 0.0, 1.0).is_err());
        assert!(proof_bounds(2.0, 1.0, 0.5).is_err());
    }
}
