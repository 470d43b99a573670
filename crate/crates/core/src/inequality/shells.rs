//! Modulation shells, the dyadic decomposition, Bourgain norms and space-time
//! Lebesgue norms.

use ndarray::Zip;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpaceTimeField;
use crate::error::{Error, Result};
use crate::spectral::{Representation, SymbolSpec};

/// Weights of the `X^{b,s}` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BourgainParams {
    pub b: f64,
    pub s: f64,
}

impl Default for BourgainParams {
    fn default() -> Self {
        Self { b: 0.55, s: 0.0 }
    }
}

impl BourgainParams {
    pub fn new(b: f64, s: f64) -> Result<Self> {
        if !(b.is_finite() && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "b and s must be finite, got b={b}, s={s}"
            )));
        }
        Ok(Self { b, s })
    }
}

/// Modulation shell at scale `K`.
///
/// `K = 0` is the core `|τ + ω| < 1`. For `K ≥ 1` the disjoint shell is the
/// half-open bin `[K, 2K)`; the overlapping shell is `[K/2, 2K]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationShell {
    pub k: f64,
    pub spec: SymbolSpec,
}

impl ModulationShell {
    pub fn new(k: f64, spec: SymbolSpec) -> Result<Self> {
        check_scale(k)?;
        Ok(Self { k, spec })
    }

    /// Membership in the disjoint bin, for `m = |τ + ω|`.
    #[inline]
    pub fn contains(&self, m: f64) -> bool {
        in_bin(self.k, m)
    }

    /// Membership in the overlapping shell `K/2 ≤ m ≤ 2K`.
    #[inline]
    pub fn contains_overlapping(&self, m: f64) -> bool {
        m >= 0.5 * self.k && m <= 2.0 * self.k
    }
}

fn check_scale(k: f64) -> Result<()> {
    if !(k == 0.0 || (k.is_finite() && k >= 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "shell scale must be 0 (core) or ≥ 1, got {k}"
        )));
    }
    Ok(())
}

#[inline]
fn in_bin(k: f64, m: f64) -> bool {
    if k == 0.0 {
        m < 1.0
    } else {
        m >= k && m < 2.0 * k
    }
}

/// Scale of the dyadic bin holding modulation `m ≥ 0`.
#[inline]
pub fn bin_scale(m: f64) -> f64 {
    if m < 1.0 {
        return 0.0;
    }
    let mut k = 1.0;
    while m >= 2.0 * k {
        k *= 2.0;
    }
    k
}

/// Keep the coefficients whose modulation satisfies `keep`; the output has
/// the representation of `u`.
fn restrict<F>(u: &SpaceTimeField, spec: &SymbolSpec, keep: F) -> SpaceTimeField
where
    F: Fn(f64) -> bool + Sync,
{
    let mut s = u.to_spectral();
    let modulation = s.modulation(spec);
    Zip::from(s.data_mut()).and(&modulation).par_for_each(|c, &m| {
        if !keep(m.abs()) {
            *c = Complex64::default();
        }
    });
    match u.representation() {
        Representation::Spectral => s,
        Representation::Physical => s.inverse().expect("spectral"),
    }
}

/// Restriction of `u` to the disjoint shell at scale `k` (`0` for the core).
pub fn modulation_project(u: &SpaceTimeField, k: f64, spec: &SymbolSpec) -> Result<SpaceTimeField> {
    check_scale(k)?;
    Ok(restrict(u, spec, |m| in_bin(k, m)))
}

/// Restriction of `u` to the overlapping shell `k/2 ≤ |τ + ω| ≤ 2k`, `k ≥ 1`.
pub fn overlapping_project(u: &SpaceTimeField, k: f64, spec: &SymbolSpec) -> Result<SpaceTimeField> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::InvalidParameter(format!("shell scale must be ≥ 1, got {k}")));
    }
    Ok(restrict(u, spec, |m| m >= 0.5 * k && m <= 2.0 * k))
}

/// Relative mass below which a projection counts as empty (transform roundoff).
pub(crate) const EMPTY_FRACTION: f64 = 1e-24;

/// The nonempty pieces of `u` on the disjoint bins `[0,1), [1,2), [2,4), …`,
/// in increasing `K`; bins holding only roundoff (relative mass below
/// `1e−24`) are dropped. The pieces sum to `u` up to that roundoff.
pub fn dyadic_decompose(u: &SpaceTimeField, spec: &SymbolSpec) -> Vec<(f64, SpaceTimeField)> {
    let s = u.to_spectral();
    let modulation = s.modulation(spec);
    let mut mass: Vec<(f64, f64)> = Vec::new();
    let mut total = 0.0;
    Zip::from(s.data()).and(&modulation).for_each(|c, &m| {
        let a = c.norm_sqr();
        total += a;
        let k = bin_scale(m.abs());
        match mass.iter_mut().find(|(kk, _)| *kk == k) {
            Some((_, v)) => *v += a,
            None => mass.push((k, a)),
        }
    });
    mass.sort_by(|a, b| a.0.total_cmp(&b.0));
    mass.into_iter()
        .filter(|&(_, a)| a > EMPTY_FRACTION * total)
        .map(|(k, _)| (k, restrict(u, spec, |m| in_bin(k, m))))
        .collect()
}

/// `‖u‖_{X^{b,s}} = (V Σ (1+|ξ|+|n|)^{2s}(1+|τ+ω|)^{2b} |û|²)^{1/2}`.
pub fn bourgain_norm(u: &SpaceTimeField, params: &BourgainParams, spec: &SymbolSpec) -> f64 {
    let s = u.to_spectral();
    let modulation = s.modulation(spec);
    let grid = s.grid();
    let (xi, eta) = (grid.xi(), grid.eta());
    let mut total = 0.0;
    for ((m, i, l), c) in s.data().indexed_iter() {
        let a = c.norm_sqr();
        if a == 0.0 {
            continue;
        }
        let freq = 1.0 + xi[i].abs() + eta[l].abs();
        let w = freq.powf(2.0 * params.s) * (1.0 + modulation[[m, i, l]].abs()).powf(2.0 * params.b);
        total += w * a;
    }
    (total * s.volume()).sqrt()
}

/// Space-time `L^p` norm with cell measure `dt·dx·dy`, for `p ∈ {4/3, 2, 4}`.
pub fn lp_spacetime_norm(u: &SpaceTimeField, p: f64) -> Result<f64> {
    let supported = [4.0 / 3.0, 2.0, 4.0];
    let p = *supported.iter().find(|&&q| (q - p).abs() < 1e-12).ok_or_else(|| {
        Error::Unsupported(format!(
            "space-time L^p norm for p = {p}; supported exponents are 4/3, 2 and 4"
        ))
    })?;
    let phys = u.to_physical();
    let cell = phys.time_step() * phys.grid().cell_area();
    let s: f64 = if p == 2.0 {
        phys.data().iter().map(|c| c.norm_sqr()).sum()
    } else if p == 4.0 {
        phys.data().iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum()
    } else {
        phys.data().iter().map(|c| c.norm().powf(p)).sum()
    };
    Ok((s * cell).powf(1.0 / p))
}
