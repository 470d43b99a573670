//! TOML run configuration. Every section is optional; unknown keys are errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fnls_core::inequality::{BourgainParams, DataKind};
use fnls_core::measure::{MeasureQuery, ScanGrid, SeriesKind};
use fnls_core::propagator::TimeWindow;
use fnls_core::solver::SimulationConfig;
use fnls_core::spectral::{make_grid, DealiasRule, Grid, Sign, SymbolSpec};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub symbol: SymbolSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub nonlinearity: NonlinearitySection,
    pub data: DataSection,
    pub probe: ProbeSection,
    pub scan: ScanSection,
    pub scaling: ScalingSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolSection {
    pub alpha: f64,
    pub sign: Sign,
}

impl Default for SymbolSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            sign: Sign::Hyperbolic,
        }
    }
}

/// Cylinder grid `[−Lx/2, Lx/2) × 𝕋`; setting `ly` makes it planar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            nx: 128,
            ny: 32,
            lx: 40.0,
            ly: None,
        }
    }
}

/// Step size and horizon for `simulate`; the sampled window `[t0, t1]` with
/// `nt` samples for `picard` and the probes (defaults to `[−δ, δ]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    pub delta: f64,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub nt: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.1,
            delta: 0.1,
            t0: None,
            t1: None,
            nt: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearitySection {
    pub nu: f64,
    pub dealias: DealiasRule,
    pub snapshot_stride: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NonlinearitySection {
    fn default() -> Self {
        Self {
            nu: 1.0,
            dealias: DealiasRule::TwoThirds,
            snapshot_stride: 0,
            max_iter: 50,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// Envelope `exp(−(j/wj)² − (n/wn)²)` on random coefficients.
    Smooth,
    Gaussian,
    WavePacket,
    Knapp,
    /// Read from `snapshot`.
    Snapshot,
}

/// Initial data for `simulate` and `picard`: unit `L²` norm times `amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub n_trunc: i64,
    pub wj: f64,
    pub wn: f64,
    pub snapshot: Option<PathBuf>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            kind: InitialKind::Smooth,
            amplitude: 1.0,
            n_trunc: 8,
            wj: 6.0,
            wn: 2.0,
            snapshot: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub b: f64,
    pub s: f64,
    pub members: usize,
    /// Frequency truncations `N` of the Strichartz, embedding and
    /// inhomogeneous sweeps (grid `4N × 4N`).
    pub truncations: Vec<usize>,
    pub kinds: Vec<DataKind>,
    /// Dyadic modulation scales of the bilinear sweep.
    pub ks: Vec<f64>,
    /// Allowed `last/median` of the per-`N` max ratios in the sweeps.
    pub flat_factor: f64,
    /// Allowed growth of the bilinear ensemble max along the `(K₁, K₂)` order.
    pub bilinear_factor: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            b: 0.55,
            s: 0.0,
            members: 8,
            truncations: vec![8, 16, 32],
            kinds: vec![DataKind::Gaussian],
            ks: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            flat_factor: 1.3,
            bilinear_factor: 2.0,
        }
    }
}

/// Single query (`measure`), scan grid (`scan`), series and proof-bound grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub xi0: f64,
    pub n0: i64,
    pub c: f64,
    pub k: f64,
    pub trunc_n: u64,
    pub n0s: Vec<i64>,
    /// Defaults to `0.1, 1, 10, 100` (hyperbolic) or `1, 10, 100` (elliptic).
    pub cs: Option<Vec<f64>>,
    pub ks: Vec<f64>,
    pub adversarial: bool,
    pub flat_factor: f64,
    pub series: SeriesKind,
    pub n_max: u64,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            xi0: 0.0,
            n0: 0,
            c: 1.0,
            k: 1.0,
            trunc_n: 10_000,
            n0s: vec![0, 1, -1, 5, -5, 50, -50],
            cs: None,
            ks: ScanGrid::dyadic_ks(6),
            adversarial: false,
            flat_factor: 1.5,
            series: SeriesKind::S1PlusHyp,
            n_max: 1 << 16,
        }
    }
}

/// `scaling`: planar Gaussian `exp(−|x|²/(2·width²))` rescaled by each `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub lambdas: Vec<f64>,
    pub s: f64,
    pub width: f64,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            lambdas: vec![1.0, 2.0, 4.0, 8.0],
            s: 0.0,
            width: 4.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn spec(&self) -> anyhow::Result<SymbolSpec> {
        Ok(SymbolSpec::new(self.symbol.alpha, self.symbol.sign)?)
    }

    pub fn grid(&self) -> anyhow::Result<Arc<Grid>> {
        let g = &self.grid;
        Ok(match g.ly {
            Some(ly) => Grid::planar(g.nx, g.ny, g.lx, ly)?,
            None => make_grid(g.nx, g.ny, g.lx)?,
        })
    }

    pub fn window(&self) -> anyhow::Result<TimeWindow> {
        let t = &self.time;
        let t0 = t.t0.unwrap_or(-t.delta);
        let t1 = t.t1.unwrap_or(t.delta);
        Ok(TimeWindow::new(t0, t1, t.nt)?)
    }

    pub fn simulation(&self) -> anyhow::Result<SimulationConfig> {
        let n = &self.nonlinearity;
        Ok(
            SimulationConfig::new(self.spec()?, self.grid()?, n.nu, self.time.dt, self.time.t_end)?
                .with_dealias(n.dealias)
                .with_snapshot_stride(n.snapshot_stride),
        )
    }

    pub fn bourgain(&self) -> anyhow::Result<BourgainParams> {
        Ok(BourgainParams::new(self.probe.b, self.probe.s)?)
    }

    pub fn query(&self) -> anyhow::Result<MeasureQuery> {
        let s = &self.scan;
        Ok(MeasureQuery::new(self.spec()?, s.xi0, s.n0, s.c, s.k, s.trunc_n)?)
    }

    /// Grid values of `C`, defaulted per sign.
    pub fn scan_cs(&self) -> Vec<f64> {
        match &self.scan.cs {
            Some(cs) => cs.clone(),
            None if self.symbol.sign == Sign::Elliptic => vec![1.0, 10.0, 100.0],
            None => vec![0.1, 1.0, 10.0, 100.0],
        }
    }

    pub fn scan_grid(&self) -> anyhow::Result<ScanGrid> {
        let s = &self.scan;
        if s.ks.iter().any(|&k| !(k >= 1.0)) {
            bail!("scan.ks must all be at least 1");
        }
        Ok(ScanGrid {
            n0s: s.n0s.clone(),
            cs: self.scan_cs(),
            ks: s.ks.clone(),
            trunc_n: s.trunc_n,
            xi0: s.xi0,
            adversarial: s.adversarial,
        })
    }
}
