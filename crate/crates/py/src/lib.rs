#![allow(clippy::too_many_arguments)]

use fnls_core::ensemble::{member_rng, smooth_random};
use fnls_core::inequality::{BourgainParams, DataKind, TruncationSweep};
use fnls_core::measure::{measure_set, proof_bounds as core_proof_bounds, series_partial as core_series, MeasureQuery};
use fnls_core::solver::{critical_index as core_critical_index, evolve, SimulationConfig};
use fnls_core::spectral::{make_grid, Sign, SymbolSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: fnls_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spec(alpha: f64, sign: &str) -> PyResult<SymbolSpec> {
    let sign: Sign = sign.parse().map_err(err)?;
    SymbolSpec::new(alpha, sign).map_err(err)
}

/// ω(ξ, n) = ξ² ± |n|^{2α}.
#[pyfunction]
fn dispersion(alpha: f64, sign: &str, xi: f64, n: i64) -> PyResult<f64> {
    Ok(spec(alpha, sign)?.dispersion(xi, n))
}

#[pyfunction]
fn critical_index(alpha: f64) -> f64 {
    core_critical_index(alpha)
}

/// Measure enclosure as a dict with `lower`, `upper`, `divergent_tail`.
#[pyfunction]
#[pyo3(signature = (alpha, sign, n0, c, k, trunc_n, xi0 = 0.0))]
fn measure<'py>(
    py: Python<'py>,
    alpha: f64,
    sign: &str,
    n0: i64,
    c: f64,
    k: f64,
    trunc_n: u64,
    xi0: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let q = MeasureQuery::new(spec(alpha, sign)?, xi0, n0, c, k, trunc_n).map_err(err)?;
    let r = measure_set(&q).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lower", r.lower)?;
    d.set_item("upper", r.upper)?;
    d.set_item("divergent_tail", r.divergent_tail)?;
    d.set_item("outside_hypotheses", !q.within_hypotheses())?;
    Ok(d)
}

#[pyfunction]
fn series_partial(kind: &str, alpha: f64, c: f64, k: f64, n: u64) -> PyResult<f64> {
    core_series(kind.parse().map_err(err)?, alpha, c, k, n).map_err(err)
}

#[pyfunction]
fn proof_bounds<'py>(py: Python<'py>, alpha: f64, c: f64, k: f64) -> PyResult<Bound<'py, PyDict>> {
    let b = core_proof_bounds(alpha, c, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("j1", b.j1)?;
    d.set_item("j1_bound", b.j1_bound)?;
    d.set_item("j2", b.j2)?;
    d.set_item("j2_bound", b.j2_bound)?;
    d.set_item("pass", b.pass)?;
    Ok(d)
}

/// Strang evolution of seeded smooth data; returns times, masses and the
/// largest relative mass drift.
#[pyfunction]
#[pyo3(signature = (alpha, sign, nx, ny, lx, nu, dt, t_end, seed = 0, amplitude = 1.0))]
fn simulate<'py>(
    py: Python<'py>,
    alpha: f64,
    sign: &str,
    nx: usize,
    ny: usize,
    lx: f64,
    nu: f64,
    dt: f64,
    t_end: f64,
    seed: u64,
    amplitude: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = make_grid(nx, ny, lx).map_err(err)?;
    let cfg = SimulationConfig::new(spec(alpha, sign)?, grid.clone(), nu, dt, t_end).map_err(err)?;
    let mut rng = member_rng(seed, 0);
    let phi = smooth_random(&grid, &mut rng, (nx / 16).max(1) as f64, (ny / 16).max(1) as f64).scaled(amplitude.into());
    let traj = py.detach(|| evolve(&phi, &cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", traj.diagnostics.iter().map(|r| r.t).collect::<Vec<_>>())?;
    d.set_item("mass", traj.diagnostics.iter().map(|r| r.mass).collect::<Vec<_>>())?;
    d.set_item("max_mass_drift", traj.max_mass_drift())?;
    Ok(d)
}

/// Strichartz ratios of a Gaussian-data sweep, one per (N, member), in
/// `probe_id` order.
#[pyfunction]
#[pyo3(signature = (alpha, sign, truncations, members, delta, nt, seed = 0))]
fn strichartz_sweep(
    py: Python<'_>,
    alpha: f64,
    sign: &str,
    truncations: Vec<usize>,
    members: usize,
    delta: f64,
    nt: usize,
    seed: u64,
) -> PyResult<Vec<(String, f64)>> {
    let sweep = TruncationSweep {
        spec: spec(alpha, sign)?,
        truncations,
        members,
        delta,
        nt,
        seed,
        params: BourgainParams::default(),
        kinds: vec![DataKind::Gaussian],
    };
    let mut reports = py.detach(|| sweep.strichartz()).map_err(err)?;
    fnls_core::report::sort_reports(&mut reports);
    Ok(reports.into_iter().map(|r| (r.probe_id, r.ratio)).collect())
}

#[pymodule]
fn fnls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(critical_index, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(series_partial, m)?)?;
    m.add_function(wrap_pyfunction!(proof_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(strichartz_sweep, m)?)?;
    Ok(())
}
