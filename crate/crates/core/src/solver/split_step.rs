use std::io::Write;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{mass, SimulationConfig};
use crate::error::{Error, Result};
use crate::propagator::Propagator;
use crate::spectral::{Field, Representation, Snapshot};

/// Exact flow of `i∂ₜu = ν|u|²u` over `dt`: `u ↦ u·e^{−iν|u|²dt}`.
pub fn nonlinear_phase_step(u: &Field, dt: f64, nu: f64) -> Result<Field> {
    u.expect(Representation::Physical)?;
    let mut out = u.clone();
    if nu != 0.0 {
        out.data_mut()
            .par_mapv_inplace(|z| z * Complex64::from_polar(1.0, -nu * z.norm_sqr() * dt));
    }
    Ok(out)
}

/// Cached phase tables for repeated Strang steps of a fixed size.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    config: SimulationConfig,
    dt: f64,
    half: Array2<Complex64>,
    full: Array2<Complex64>,
}

impl SplitStepper {
    pub fn new(config: &SimulationConfig, dt: f64) -> Self {
        let prop = Propagator::new(&config.grid, &config.spec);
        Self {
            config: config.clone(),
            dt,
            half: prop.phases(0.5 * dt),
            full: prop.phases(dt),
        }
    }

    /// One step on spectral data, in place.
    pub fn step_spectral(&self, uh: &mut Field) {
        debug_assert_eq!(uh.representation(), Representation::Spectral);
        if self.config.nu == 0.0 {
            Zip::from(uh.data_mut()).and(&self.full).par_for_each(|c, p| *c *= p);
            return;
        }
        Zip::from(uh.data_mut()).and(&self.half).par_for_each(|c, p| *c *= p);
        let u = uh.inverse().expect("spectral");
        let u = nonlinear_phase_step(&u, self.dt, self.config.nu).expect("physical");
        let mut next = u.forward().expect("physical");
        crate::spectral::field::dealias_in_place(&self.config.grid, next.data_mut(), self.config.dealias);
        Zip::from(next.data_mut()).and(&self.half).par_for_each(|c, p| *c *= p);
        *uh = next;
    }
}

/// `U(dt/2) ∘ N(dt) ∘ U(dt/2)` with dealiasing after the nonlinear substep.
/// The output keeps the representation of `u`.
pub fn strang_step(u: &Field, dt: f64, config: &SimulationConfig) -> Field {
    let stepper = SplitStepper::new(config, dt);
    let mut uh = u.to_spectral();
    stepper.step_spectral(&mut uh);
    match u.representation() {
        Representation::Spectral => uh,
        Representation::Physical => uh.inverse().expect("spectral"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub mass_drift_rel: f64,
    pub l4_space_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub diagnostics: Vec<DiagnosticRow>,
    pub snapshots: Vec<Snapshot>,
    /// State at `t_end`, physical representation.
    pub final_state: Field,
}

impl Trajectory {
    pub fn max_mass_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|r| r.mass_drift_rel.abs())
            .fold(0.0, f64::max)
    }
}

/// Run `t_end/dt` Strang steps from `phi`, recording mass and spatial `L⁴`
/// norm after every step and a snapshot every `snapshot_stride` steps
/// (plus the initial and final states; stride 0 keeps only those two).
pub fn evolve(phi: &Field, config: &SimulationConfig) -> Result<Trajectory> {
    config.validate()?;
    if !phi.grid().same_as(&config.grid) {
        return Err(Error::GridMismatch);
    }
    let steps = config.steps()?;
    let stepper = SplitStepper::new(config, config.dt);
    let mut uh = phi.to_spectral();
    let u0 = phi.to_physical();
    let m0 = mass(&u0);
    let mut diagnostics = Vec::with_capacity(steps + 1);
    diagnostics.push(DiagnosticRow {
        step: 0,
        t: 0.0,
        mass: m0,
        mass_drift_rel: 0.0,
        l4_space_norm: u0.norm_lp(4.0),
    });
    let mut snapshots = vec![Snapshot { field: u0, time: 0.0 }];
    let mut u = phi.to_physical();
    for step in 1..=steps {
        stepper.step_spectral(&mut uh);
        let t = step as f64 * config.dt;
        u = uh.inverse()?;
        if !u.is_finite() {
            return Err(Error::BlowUp { step, t });
        }
        let m = mass(&u);
        diagnostics.push(DiagnosticRow {
            step,
            t,
            mass: m,
            mass_drift_rel: if m0 > 0.0 { (m - m0) / m0 } else { m },
            l4_space_norm: u.norm_lp(4.0),
        });
        let stride_hit = config.snapshot_stride > 0 && step % config.snapshot_stride == 0;
        if stride_hit || step == steps {
            snapshots.push(Snapshot {
                field: u.clone(),
                time: t,
            });
        }
    }
    Ok(Trajectory {
        diagnostics,
        snapshots,
        final_state: u,
    })
}

/// CSV with columns `step,t,mass,mass_drift_rel,l4_space_norm`.
pub fn write_diagnostics_csv<W: Write>(w: W, rows: &[DiagnosticRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
