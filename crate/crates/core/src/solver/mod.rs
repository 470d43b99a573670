//! Nonlinear evolution of `i∂ₜu + ℒu = ν|u|²u`: Strang splitting, Picard
//! iteration of the integral equation, mass diagnostics and scaling.

mod picard;
mod scaling;
mod split_step;

pub use picard::{picard_iterate, PicardOutcome, PicardReport, MAX_PICARD_SAMPLES};
pub use scaling::{critical_index, homogeneous_sobolev_norm, rescale, ScalingParams};
pub use split_step::{
    evolve, nonlinear_phase_step, strang_step, write_diagnostics_csv, DiagnosticRow, SplitStepper, Trajectory,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{DealiasRule, Field, Grid, SymbolSpec};

/// Everything needed to advance the cubic equation on one grid.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub spec: SymbolSpec,
    pub grid: Arc<Grid>,
    /// Focusing for `ν < 0`, defocusing for `ν > 0`.
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: DealiasRule,
    pub snapshot_stride: usize,
}

impl SimulationConfig {
    pub fn new(spec: SymbolSpec, grid: Arc<Grid>, nu: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            spec,
            grid,
            nu,
            dt,
            t_end,
            dealias: DealiasRule::TwoThirds,
            snapshot_stride: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_dealias(mut self, rule: DealiasRule) -> Self {
        self.dealias = rule;
        self
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.nu.is_finite() {
            return Err(Error::InvalidParameter("nu must be finite".into()));
        }
        if !self.t_end.is_finite() {
            return Err(Error::InvalidParameter("t_end must be finite".into()));
        }
        Ok(())
    }

    /// Number of steps `t_end/dt`, which must be a positive integer.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_end / self.dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end/dt = {ratio} is not a positive integer"
            )));
        }
        Ok(steps as usize)
    }
}

/// `M[u] = ∫|u|² dx dy` by the cell-measure quadrature.
pub fn mass(u: &Field) -> f64 {
    u.norm_sqr()
}
