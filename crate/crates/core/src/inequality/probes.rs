//! Ratio probes for the linear, inhomogeneous, bilinear and embedding estimates.

use num_complex::Complex64;
use rayon::prelude::*;

use super::shells::{bourgain_norm, lp_spacetime_norm, overlapping_project, BourgainParams, EMPTY_FRACTION};
use super::spacetime::{sample_times, SpaceTimeField};
use crate::error::{Error, Result};
use crate::propagator::{duhamel_trajectory, Propagator, Quadrature, TimeWindow};
use crate::report::ProbeReport;
use crate::spectral::{Field, SymbolSpec};

/// `‖U(t)φ‖_{L⁴(I × box)} / ‖φ‖_{L²}` with `I` sampled at the window's periodic
/// instants.
pub fn strichartz_ratio(phi: &Field, window: &TimeWindow, spec: &SymbolSpec) -> Result<ProbeReport> {
    let den = phi.norm_l2();
    if !(den > 0.0) {
        return Err(Error::ProbeRejected("Strichartz probe needs nonzero data".into()));
    }
    let grid = phi.grid();
    let prop = Propagator::new(grid, spec);
    let phi = phi.to_spectral();
    let per_slice: Vec<f64> = sample_times(window)
        .into_par_iter()
        .map(|t| {
            let u = prop.apply(&phi, t).to_physical();
            u.data().iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum::<f64>()
        })
        .collect();
    let cell = window.length() / window.nt as f64 * grid.cell_area();
    let num = (per_slice.iter().sum::<f64>() * cell).powf(0.25);
    Ok(ProbeReport::new(
        "strichartz",
        spec,
        grid,
        window.length(),
        window.nt,
        num,
        den,
    ))
}

/// `‖∫₀ᵗ U(t − t′) f(t′) dt′‖_{L⁴} / ‖f‖_{L^{4/3}}`; the Duhamel integral uses
/// the trapezoid rule over the sample instants, which must include `t = 0`.
pub fn inhomog_ratio(f: &SpaceTimeField, spec: &SymbolSpec) -> Result<ProbeReport> {
    let den = lp_spacetime_norm(f, 4.0 / 3.0)?;
    if !(den > 0.0) {
        return Err(Error::ProbeRejected("inhomogeneous probe needs nonzero forcing".into()));
    }
    let d = duhamel_field(f, spec)?;
    let num = lp_spacetime_norm(&d, 4.0)?;
    Ok(ProbeReport::new(
        "inhomog",
        spec,
        f.grid(),
        f.window().length(),
        f.nt(),
        num,
        den,
    ))
}

/// The Duhamel integral of `f` at its sample instants.
pub fn duhamel_field(f: &SpaceTimeField, spec: &SymbolSpec) -> Result<SpaceTimeField> {
    let slices = f.slices();
    let out = duhamel_trajectory(&slices, &f.time_nodes(), spec, Quadrature::Trapezoid)?;
    SpaceTimeField::from_slices(f.window(), &out)
}

/// Outcome of a bilinear probe: the report plus the projection diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProbe {
    pub report: ProbeReport,
    /// Fraction of `‖u_i‖²` removed by the shell projection.
    pub discarded: [f64; 2],
    /// `‖P u₁‖_{L⁴}‖P u₂‖_{L⁴}`, an upper bound for the numerator.
    pub holder_bound: f64,
    pub holder_ok: bool,
}

/// `‖u₁u₂‖_{L²} / ((K₁K₂)^{1/2}‖u₁‖‖u₂‖)` after restricting each `u_i` to the
/// shell `K_i/2 ≤ |τ + ω| ≤ 2K_i`.
pub fn bilinear_ratio(
    u1: &SpaceTimeField,
    u2: &SpaceTimeField,
    k1: f64,
    k2: f64,
    spec: &SymbolSpec,
) -> Result<BilinearProbe> {
    u1.check_compatible(u2)?;
    let p1 = project_nonempty(u1, k1, spec)?;
    let p2 = project_nonempty(u2, k2, spec)?;
    let (n1, n2) = (p1.0.norm_l2(), p2.0.norm_l2());
    let num = p1.0.product(&p2.0)?.norm_l2();
    let den = (k1 * k2).sqrt() * n1 * n2;
    let holder_bound = lp_spacetime_norm(&p1.0, 4.0)? * lp_spacetime_norm(&p2.0, 4.0)?;
    let holder_ok = num <= holder_bound * (1.0 + 1e-12);
    let mut report = ProbeReport::new("bilinear", spec, u1.grid(), u1.window().length(), u1.nt(), num, den);
    report.k1 = Some(k1);
    report.k2 = Some(k2);
    Ok(BilinearProbe {
        report,
        discarded: [p1.1, p2.1],
        holder_bound,
        holder_ok,
    })
}

fn project_nonempty(u: &SpaceTimeField, k: f64, spec: &SymbolSpec) -> Result<(SpaceTimeField, f64)> {
    let total = u.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::ProbeRejected("bilinear probe needs nonzero inputs".into()));
    }
    let p = overlapping_project(u, k, spec)?.to_physical();
    let kept = p.norm_sqr();
    if !(kept > EMPTY_FRACTION * total) {
        return Err(Error::ProbeRejected(format!(
            "input has no support in the modulation shell at K = {k}"
        )));
    }
    Ok((p, (1.0 - kept / total).max(0.0)))
}

/// `‖u‖_{L⁴} / ‖u‖_{X^{b,s}}`; requires `b > 1/2`.
pub fn embedding_ratio(u: &SpaceTimeField, params: &BourgainParams, spec: &SymbolSpec) -> Result<ProbeReport> {
    if !(params.b > 0.5) {
        return Err(Error::ProbeRejected(format!(
            "the L⁴ embedding of X^{{b,0}} needs b > 1/2, got b = {}",
            params.b
        )));
    }
    let den = bourgain_norm(u, params, spec);
    if !(den > 0.0) {
        return Err(Error::ProbeRejected("embedding probe needs nonzero data".into()));
    }
    let num = lp_spacetime_norm(u, 4.0)?;
    let mut report = ProbeReport::new("embedding", spec, u.grid(), u.window().length(), u.nt(), num, den);
    report.b = Some(params.b);
    report.s = Some(params.s);
    Ok(report)
}

/// `ψ_δ(t)·u(t)` at the sample instants.
pub fn apply_cutoff(u: &SpaceTimeField, delta: f64) -> SpaceTimeField {
    let mut out = u.to_physical();
    let times = out.times();
    for (mut s, &t) in out.data_mut().outer_iter_mut().zip(&times) {
        let c = Complex64::new(cutoff(t, delta), 0.0);
        s.mapv_inplace(|v| v * c);
    }
    out
}

/// Smooth cut-off: `1` on `|t| ≤ δ`, `0` on `|t| ≥ 2δ`, `C^∞` in between.
pub fn cutoff(t: f64, delta: f64) -> f64 {
    let s = t.abs() / delta;
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let x = 2.0 - s;
        let a = smooth_step_part(x);
        a / (a + smooth_step_part(1.0 - x))
    }
}

fn smooth_step_part(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}
