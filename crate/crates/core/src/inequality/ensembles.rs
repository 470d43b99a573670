//! Random data for the probes and the sweeps that take a max over an ensemble.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probes::{bilinear_ratio, embedding_ratio, inhomog_ratio, strichartz_ratio, BilinearProbe};
use super::shells::BourgainParams;
use super::spacetime::SpaceTimeField;
use crate::ensemble::{complex_normal, gaussian_block, member_rng};
use crate::error::{Error, Result};
use crate::propagator::TimeWindow;
use crate::report::ProbeReport;
use crate::spectral::{make_grid, Field, Grid, Representation, SymbolSpec};

/// Family of initial data for the Strichartz sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Independent Gaussian coefficients on `|j|, |n| < N`.
    Gaussian,
    /// Coherent Gaussian packet around a random frequency.
    WavePacket,
    /// Coherent tube: one transverse mode, a band of `N/2` line modes.
    Knapp,
}

impl DataKind {
    pub const ALL: [DataKind; 3] = [DataKind::Gaussian, DataKind::WavePacket, DataKind::Knapp];

    pub fn as_str(self) -> &'static str {
        match self {
            DataKind::Gaussian => "gaussian",
            DataKind::WavePacket => "wave_packet",
            DataKind::Knapp => "knapp",
        }
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DataKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown data kind {s:?}")))
    }
}

/// Unit-`L²` initial data of the given kind, truncated to `|j|, |n| < n_trunc`.
pub fn initial_data<R: Rng + ?Sized>(kind: DataKind, grid: &Arc<Grid>, rng: &mut R, n_trunc: i64) -> Field {
    let n = n_trunc.max(1);
    let f = match kind {
        DataKind::Gaussian => return gaussian_block(grid, rng, n, n),
        DataKind::WavePacket => {
            let jc = rng.random_range(-n / 2..=n / 2) as f64;
            let nc = rng.random_range(-n / 2..=n / 2) as f64;
            let w = (n as f64 / 8.0).max(1.0);
            mode_spectrum(grid, |j, m| {
                if j.abs() >= n || m.abs() >= n {
                    return 0.0;
                }
                let (a, b) = ((j as f64 - jc) / w, (m as f64 - nc) / w);
                (-(a * a + b * b)).exp()
            })
        }
        DataKind::Knapp => {
            let nc = rng.random_range(-(n - 1)..n);
            let width = (n / 2).max(1);
            mode_spectrum(grid, |j, m| if m == nc && (0..width).contains(&j) { 1.0 } else { 0.0 })
        }
    };
    let norm = f.norm_l2();
    f.scaled(Complex64::new(1.0 / norm, 0.0))
}

fn mode_spectrum<F: Fn(i64, i64) -> f64>(grid: &Arc<Grid>, f: F) -> Field {
    let mut out = Field::zeros(grid, Representation::Spectral);
    for ((i, l), c) in out.data_mut().indexed_iter_mut() {
        *c = Complex64::new(f(grid.mode_x(i), grid.mode_y(l)), 0.0);
    }
    out
}

/// Spectral space-time field with coefficient `g·amp(|τ + ω|, j, n)`, `g`
/// complex normal, drawn for every entry in storage order.
pub fn spacetime_random<R, A>(
    grid: &Arc<Grid>,
    window: &TimeWindow,
    spec: &SymbolSpec,
    rng: &mut R,
    amp: A,
) -> SpaceTimeField
where
    R: Rng + ?Sized,
    A: Fn(f64, i64, i64) -> f64,
{
    let mut u = SpaceTimeField::zeros(grid, window, Representation::Spectral);
    let modulation = u.modulation(spec);
    for ((m, i, l), c) in u.data_mut().indexed_iter_mut() {
        let g = complex_normal(rng);
        *c = g * amp(modulation[[m, i, l]].abs(), grid.mode_x(i), grid.mode_y(l));
    }
    u
}

/// Gaussian coefficients on `K/2 ≤ |τ + ω| ≤ 2K`, `|j| < max_j`, `|n| < max_n`.
pub fn shell_localized<R: Rng + ?Sized>(
    grid: &Arc<Grid>,
    window: &TimeWindow,
    spec: &SymbolSpec,
    rng: &mut R,
    k: f64,
    max_j: i64,
    max_n: i64,
) -> SpaceTimeField {
    spacetime_random(grid, window, spec, rng, |m, j, n| {
        if j.abs() < max_j && n.abs() < max_n && m >= 0.5 * k && m <= 2.0 * k {
            1.0
        } else {
            0.0
        }
    })
}

/// Gaussian coefficients with envelope `(1 + |τ + ω|)^{−1}` on `|j| < max_j`, `|n| < max_n`.
pub fn multi_shell<R: Rng + ?Sized>(
    grid: &Arc<Grid>,
    window: &TimeWindow,
    spec: &SymbolSpec,
    rng: &mut R,
    max_j: i64,
    max_n: i64,
) -> SpaceTimeField {
    spacetime_random(grid, window, spec, rng, |m, j, n| {
        if j.abs() < max_j && n.abs() < max_n {
            1.0 / (1.0 + m)
        } else {
            0.0
        }
    })
}

/// Forcing with independent Gaussian coefficients on `|j| < max_j`, `|n| < max_n`
/// at every `τ`.
pub fn random_forcing<R: Rng + ?Sized>(
    grid: &Arc<Grid>,
    window: &TimeWindow,
    spec: &SymbolSpec,
    rng: &mut R,
    max_j: i64,
    max_n: i64,
) -> SpaceTimeField {
    spacetime_random(grid, window, spec, rng, |_, j, n| {
        if j.abs() < max_j && n.abs() < max_n {
            1.0
        } else {
            0.0
        }
    })
}

/// Last value over the median of a sequence; `≤ 1.3` reads as "no growth".
pub fn last_over_median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    values[n - 1] / median
}

/// Largest `table[i][j] / table[i'][j']` over `i' ≤ i`, `j' ≤ j`,
/// `(i', j') ≠ (i, j)`: growth along the product order of a 2-D scale grid.
pub fn product_order_drift(table: &[Vec<f64>]) -> f64 {
    let mut drift: f64 = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            for (ip, rp) in table.iter().enumerate().take(i + 1) {
                for (jp, &w) in rp.iter().enumerate().take(j + 1) {
                    if (ip, jp) != (i, j) {
                        drift = drift.max(v / w);
                    }
                }
            }
        }
    }
    drift
}

/// Ensemble sweep over frequency truncations `N` on `4N × 4N` grids of the
/// cylinder with `Lx = 2π`, time window `[−δ, δ)` with `nt` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSweep {
    pub spec: SymbolSpec,
    pub truncations: Vec<usize>,
    pub members: usize,
    pub delta: f64,
    pub nt: usize,
    pub seed: u64,
    pub params: BourgainParams,
    /// Initial-data families for the Strichartz probe; member `m` uses
    /// `kinds[m % kinds.len()]`. Coherent families concentrate at `t = 0`
    /// and need `nt` to resolve the dispersion time `~1/ω_max`.
    pub kinds: Vec<DataKind>,
}

impl TruncationSweep {
    pub fn grid_for(&self, n: usize) -> Result<Arc<Grid>> {
        make_grid(4 * n, 4 * n, 2.0 * PI)
    }

    pub fn window(&self) -> Result<TimeWindow> {
        TimeWindow::symmetric(self.delta, self.nt)
    }

    fn run<F>(&self, probe: &str, eval: F) -> Result<Vec<ProbeReport>>
    where
        F: Fn(&Arc<Grid>, &TimeWindow, usize, u64) -> Result<(ProbeReport, String)> + Sync,
    {
        let window = self.window()?;
        let mut out = Vec::new();
        for &n in &self.truncations {
            let grid = self.grid_for(n)?;
            let reports: Result<Vec<ProbeReport>> = (0..self.members as u64)
                .into_par_iter()
                .map(|m| {
                    let (r, kind) = eval(&grid, &window, n, m)?;
                    Ok(r.with_id(format!(
                        "{probe}/{}/a{}/N{n:04}/m{m:03}",
                        self.spec.sign, self.spec.alpha
                    ))
                    .with_data(kind, Some(self.seed ^ m)))
                })
                .collect();
            out.extend(reports?);
        }
        Ok(out)
    }

    /// `‖U(t)φ‖_{L⁴}/‖φ‖_{L²}` with members cycling through `kinds`.
    pub fn strichartz(&self) -> Result<Vec<ProbeReport>> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidParameter(
                "Strichartz sweep needs at least one data kind".into(),
            ));
        }
        self.run("strichartz", |grid, window, n, m| {
            let kind = self.kinds[m as usize % self.kinds.len()];
            let mut rng = member_rng(self.seed, m);
            let phi = initial_data(kind, grid, &mut rng, n as i64);
            Ok((strichartz_ratio(&phi, window, &self.spec)?, kind.to_string()))
        })
    }

    /// `‖u‖_{L⁴}/‖u‖_{X^{b,s}}` on [`multi_shell`] data.
    pub fn embedding(&self) -> Result<Vec<ProbeReport>> {
        self.run("embedding", |grid, window, n, m| {
            let mut rng = member_rng(self.seed, m);
            let u = multi_shell(grid, window, &self.spec, &mut rng, n as i64, n as i64);
            Ok((embedding_ratio(&u, &self.params, &self.spec)?, "multi_shell".into()))
        })
    }

    /// Duhamel `L⁴` over forcing `L^{4/3}` on [`random_forcing`] data.
    pub fn inhomog(&self) -> Result<Vec<ProbeReport>> {
        self.run("inhomog", |grid, window, n, m| {
            let mut rng = member_rng(self.seed, m);
            let f = random_forcing(grid, window, &self.spec, &mut rng, n as i64, n as i64);
            Ok((inhomog_ratio(&f, &self.spec)?, "random_forcing".into()))
        })
    }
}

/// Max ratio for each truncation, in sweep order, reading `N = Nx/4`.
pub fn max_by_truncation(reports: &[ProbeReport]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in reports {
        let n = r.nx / 4;
        match out.iter_mut().find(|(m, _)| *m == n) {
            Some((_, v)) => *v = v.max(r.ratio),
            None => out.push((n, r.ratio)),
        }
    }
    out
}

/// Bilinear probes on shell-localized pairs over a dyadic `(K₁, K₂)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearSweep {
    pub spec: SymbolSpec,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub nt: usize,
    pub delta: f64,
    pub ks: Vec<f64>,
    pub members: usize,
    pub seed: u64,
}

/// Sweep output: every probe, the ensemble max per `(K₁, K₂)` cell, and the
/// growth of that max along the product order.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSummary {
    pub probes: Vec<BilinearProbe>,
    pub sup: Vec<Vec<f64>>,
    pub drift: f64,
    pub holder_ok: bool,
}

impl BilinearSweep {
    pub fn run(&self) -> Result<BilinearSummary> {
        let grid = make_grid(self.nx, self.ny, self.lx)?;
        let window = TimeWindow::symmetric(self.delta, self.nt)?;
        let (max_j, max_n) = ((self.nx / 4) as i64, (self.ny / 4) as i64);
        let nk = self.ks.len();
        let per_member: Result<Vec<Vec<BilinearProbe>>> = (0..self.members as u64)
            .into_par_iter()
            .map(|m| {
                let mut rng = member_rng(self.seed, m);
                let mut draw = || -> Vec<SpaceTimeField> {
                    self.ks
                        .iter()
                        .map(|&k| shell_localized(&grid, &window, &self.spec, &mut rng, k, max_j, max_n).to_physical())
                        .collect()
                };
                let first = draw();
                let second = draw();
                let mut probes = Vec::with_capacity(nk * nk);
                for (a, &k1) in self.ks.iter().enumerate() {
                    for (b, &k2) in self.ks.iter().enumerate() {
                        let mut p = bilinear_ratio(&first[a], &second[b], k1, k2, &self.spec)?;
                        p.report = p
                            .report
                            .with_id(format!(
                                "bilinear/{}/a{}/K{k1:03}x{k2:03}/m{m:03}",
                                self.spec.sign, self.spec.alpha
                            ))
                            .with_data("shell_localized", Some(self.seed ^ m));
                        probes.push(p);
                    }
                }
                Ok(probes)
            })
            .collect();
        let mut probes: Vec<BilinearProbe> = per_member?.into_iter().flatten().collect();
        probes.sort_by(|a, b| a.report.probe_id.cmp(&b.report.probe_id));
        let mut sup = vec![vec![0.0; nk]; nk];
        for p in &probes {
            let a = self.ks.iter().position(|&k| Some(k) == p.report.k1).expect("k1");
            let b = self.ks.iter().position(|&k| Some(k) == p.report.k2).expect("k2");
            sup[a][b] = f64::max(sup[a][b], p.report.ratio);
        }
        let drift = product_order_drift(&sup);
        let holder_ok = probes.iter().all(|p| p.holder_ok);
        Ok(BilinearSummary {
            probes,
            sup,
            drift,
            holder_ok,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_rule() {
        assert_eq!(last_over_median(&[1.0, 2.0, 3.0]), 1.5);
        assert_eq!(last_over_median(&[2.0, 1.0, 1.0, 1.0]), 1.0);
    }

    #[test]
    fn drift_of_decreasing_table_is_at_most_one() {
        let t = vec![vec![4.0, 2.0], vec![2.0, 1.0]];
        assert_eq!(product_order_drift(&t), 0.5);
        let t = vec![vec![1.0, 3.0], vec![1.0, 1.0]];
        assert_eq!(product_order_drift(&t), 3.0);
    }

    #[test]
    fn data_kinds_parse() {
        for k in DataKind::ALL {
            assert_eq!(k.as_str().parse::<DataKind>().unwrap(), k);
        }
    }
}
