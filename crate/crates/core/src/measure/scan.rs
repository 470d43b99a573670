use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{measure_set, MeasureQuery};
use crate::error::{Error, Result};
use crate::spectral::{Sign, SymbolSpec};

/// One row of the measure CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub alpha: f64,
    pub sign: Sign,
    pub xi0: f64,
    pub n0: i64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "trunc_N")]
    pub trunc_n: u64,
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "ratio_upper_over_K")]
    pub ratio_upper_over_k: f64,
    pub divergent_tail: bool,
}

impl MeasureRow {
    pub fn from_query(q: &MeasureQuery) -> Result<Self> {
        let r = measure_set(q)?;
        Ok(Self {
            alpha: q.spec.alpha,
            sign: q.spec.sign,
            xi0: q.xi0,
            n0: q.n0,
            c: q.c,
            k: q.k,
            trunc_n: q.trunc_n,
            lower: r.lower,
            upper: r.upper,
            ratio_upper_over_k: r.upper / q.k,
            divergent_tail: r.divergent_tail,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub n0s: Vec<i64>,
    pub cs: Vec<f64>,
    pub ks: Vec<f64>,
    pub trunc_n: u64,
    pub xi0: f64,
    /// Add, for every `(n₀, K)`, the values of `C` at which a single section
    /// reaches its largest length: `C = A_m − K` (hyperbolic − branch apex) or
    /// `C = A_m` (elliptic), for `m` near `0`, `n₀/2` and `n₀`.
    pub adversarial: bool,
}

impl ScanGrid {
    /// Dyadic `K = 1, 2, …, 2^kmax`.
    pub fn dyadic_ks(kmax: u32) -> Vec<f64> {
        (0..=kmax).map(|e| f64::from(1u32 << e)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub spec: SymbolSpec,
    pub rows: Vec<MeasureRow>,
    /// `(K, max ratio over n₀ and C)` in the order of `ks`.
    pub sup_by_k: Vec<(f64, f64)>,
    /// Largest upward drift `sup(K)/sup(K′)` over pairs `K′ < K` of the grid;
    /// `≤ 1` when the sup never grows with `K`.
    pub flatness: f64,
    /// `max_K sup / min_K sup`, recorded alongside the drift.
    pub spread: f64,
    /// `(C, max ratio over n₀ and K)` over the grid values of `C`.
    pub sup_by_c: Vec<(f64, f64)>,
    /// Least-squares slope of `ln sup_by_c` against `ln C`.
    pub c_exponent: Option<f64>,
    pub outside_hypotheses: bool,
}

impl ScanTable {
    pub fn sup_ratio(&self) -> f64 {
        self.sup_by_k.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// Whether the sup over `(n₀, C)` stays within `factor` across `K`.
    pub fn is_flat(&self, factor: f64) -> bool {
        self.flatness.is_finite() && self.flatness <= factor
    }
}

fn adversarial_cs(q: &MeasureQuery) -> Vec<f64> {
    let n0 = q.n0;
    let mut ms: Vec<i64> = (-2..=2).collect();
    for centre in [n0 / 2, n0] {
        ms.extend([centre - 1, centre, centre + 1]);
    }
    ms.sort_unstable();
    ms.dedup();
    let mut cs: Vec<f64> = ms
        .into_iter()
        .map(|m| match q.spec.sign {
            Sign::Hyperbolic => q.a_n(m) - q.k,
            Sign::Elliptic => q.a_n(m),
        })
        .filter(|&c| match q.spec.sign {
            Sign::Hyperbolic => c > 0.0,
            Sign::Elliptic => c >= 1.0,
        })
        .collect();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    cs
}

/// `max sup(K)/sup(K′)` over `K′ < K`; `1` for a single point, `∞` if a
/// positive value follows a zero.
pub fn upward_drift(ks: &[f64], values: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = ks.iter().copied().zip(values.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut drift = 1.0f64;
    let mut running_min = f64::INFINITY;
    for (_, v) in pts {
        if running_min.is_finite() {
            let r = if running_min > 0.0 {
                v / running_min
            } else if v > 0.0 {
                f64::INFINITY
            } else {
                1.0
            };
            drift = drift.max(r);
        }
        running_min = running_min.min(v);
    }
    drift
}

pub(crate) fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `𝔪_upper/K` over the grid, with per-`K` and per-`C` sups.
///
/// Rows come out in grid order (`n₀`, then `C`, then `K`, adversarial `C`
/// values after the grid ones); cells are evaluated in parallel.
pub fn ratio_scan(spec: SymbolSpec, grid: &ScanGrid) -> Result<ScanTable> {
    if grid.n0s.is_empty() || grid.cs.is_empty() || grid.ks.is_empty() {
        return Err(Error::InvalidParameter("scan grid has an empty axis".into()));
    }
    let mut cells: Vec<(MeasureQuery, bool)> = Vec::new();
    for &n0 in &grid.n0s {
        for &c in &grid.cs {
            for &k in &grid.ks {
                cells.push((MeasureQuery::new(spec, grid.xi0, n0, c, k, grid.trunc_n)?, true));
            }
        }
        if grid.adversarial {
            for &k in &grid.ks {
                let probe = MeasureQuery {
                    spec,
                    xi0: grid.xi0,
                    n0,
                    c: 1.0,
                    k,
                    trunc_n: grid.trunc_n,
                };
                for c in adversarial_cs(&probe) {
                    cells.push((MeasureQuery { c, ..probe }, false));
                }
            }
        }
    }
    let rows: Vec<MeasureRow> = cells
        .par_iter()
        .map(|(q, _)| MeasureRow::from_query(q))
        .collect::<Result<_>>()?;

    let sup_by_k: Vec<(f64, f64)> = grid
        .ks
        .iter()
        .map(|&k| {
            let s = rows
                .iter()
                .filter(|r| r.k == k)
                .map(|r| r.ratio_upper_over_k)
                .fold(0.0, f64::max);
            (k, s)
        })
        .collect();
    let values: Vec<f64> = sup_by_k.iter().map(|p| p.1).collect();
    let flatness = upward_drift(&grid.ks, &values);
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };

    let sup_by_c: Vec<(f64, f64)> = grid
        .cs
        .iter()
        .map(|&c| {
            let s = rows
                .iter()
                .zip(&cells)
                .filter(|(r, (_, on_grid))| *on_grid && r.c == c)
                .map(|(r, _)| r.ratio_upper_over_k)
                .fold(0.0, f64::max);
            (c, s)
        })
        .collect();
    let logs: Vec<(f64, f64)> = sup_by_c
        .iter()
        .filter(|p| p.1.is_finite() && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    Ok(ScanTable {
        spec,
        rows,
        sup_by_k,
        flatness,
        spread,
        sup_by_c,
        c_exponent: fit_slope(&logs),
        outside_hypotheses: !spec.within_hypotheses(),
    })
}

/// Measure CSV: `alpha,sign,xi0,n0,C,K,trunc_N,lower,upper,ratio_upper_over_K,divergent_tail`,
/// with a trailing `outside_hypotheses` column when `outside` is given.
pub fn write_measure_csv<W: Write>(w: W, rows: &[MeasureRow], outside: Option<bool>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    match outside {
        None => {
            for r in rows {
                wtr.serialize(r)?;
            }
        }
        Some(flag) => {
            wtr.write_record([
                "alpha",
                "sign",
                "xi0",
                "n0",
                "C",
                "K",
                "trunc_N",
                "lower",
                "upper",
                "ratio_upper_over_K",
                "divergent_tail",
                "outside_hypotheses",
            ])?;
            for r in rows {
                wtr.write_record([
                    r.alpha.to_string(),
                    r.sign.to_string(),
                    r.xi0.to_string(),
                    r.n0.to_string(),
                    r.c.to_string(),
                    r.k.to_string(),
                    r.trunc_n.to_string(),
                    r.lower.to_string(),
                    r.upper.to_string(),
                    r.ratio_upper_over_k.to_string(),
                    r.divergent_tail.to_string(),
                    flag.to_string(),
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_only_counts_growth() {
        let ks = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(upward_drift(&ks, &[4.0, 3.0, 2.0, 1.0]), 1.0);
        assert_eq!(upward_drift(&ks, &[2.0, 3.0, 1.0, 2.5]), 2.5);
        assert_eq!(upward_drift(&[8.0, 1.0], &[3.0, 1.0]), 3.0);
        assert_eq!(upward_drift(&[1.0], &[5.0]), 1.0);
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert!(fit_slope(&pts[..1]).is_none());
    }

    #[test]
    fn adversarial_values_are_admissible() {
        let spec = SymbolSpec::elliptic(1.5).unwrap();
        let q = MeasureQuery::new(spec, 0.0, 5, 1.0, 2.0, 10).unwrap();
        let cs = adversarial_cs(&q);
        assert!(!cs.is_empty());
        assert!(cs.iter().all(|&c| c >= 1.0));
    }
}
