use serde::{Deserialize, Serialize};

use super::Neumaier;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `Σ_{n=1}^{N} K/√(n^{2α} + C + K)`, the majorant of the hyperbolic + branch.
    S1PlusHyp,
    /// `2 Σ_{|n| ≤ min(N, ⌊C^{1/2α}⌋)} K/(√(C+K−|n|^{2α}) + √(C−|n|^{2α}))`, summed
    /// over both signs of `n`; the interior part of the elliptic measure.
    S1TildeElliptic,
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1_plus_hyp" | "S1_plus_hyp" => Ok(Self::S1PlusHyp),
            "s1_tilde_elliptic" | "S1_tilde_elliptic" => Ok(Self::S1TildeElliptic),
            other => Err(Error::InvalidParameter(format!("unknown series kind '{other}'"))),
        }
    }
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::S1PlusHyp => "s1_plus_hyp",
            Self::S1TildeElliptic => "s1_tilde_elliptic",
        }
    }
}

/// Largest `m ≥ 0` with `m^{2α} ≤ c`.
fn floor_root(c: f64, alpha: f64) -> u64 {
    let p = 2.0 * alpha;
    let mut m = c.powf(1.0 / p).floor().max(0.0) as u64;
    while ((m + 1) as f64).powf(p) <= c {
        m += 1;
    }
    while m > 0 && (m as f64).powf(p) > c {
        m -= 1;
    }
    m
}

/// Partial sum through `N` of the selected series.
pub fn series_partial(kind: SeriesKind, alpha: f64, c: f64, k: f64, n: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(c > 0.0 && c.is_finite() && k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C and K must be positive, got C={c}, K={k}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let p = 2.0 * alpha;
    let mut acc = Neumaier::default();
    match kind {
        SeriesKind::S1PlusHyp => {
            for m in 1..=n {
                acc.add(k / ((m as f64).powf(p) + c + k).sqrt());
            }
        }
        SeriesKind::S1TildeElliptic => {
            let top = n.min(floor_root(c, alpha));
            for m in 0..=top {
                let a = (m as f64).powf(p);
                let term = 2.0 * k / ((c + k - a).sqrt() + (c - a).max(0.0).sqrt());
                acc.add(if m == 0 { term } else { 2.0 * term });
            }
        }
    }
    Ok(acc.total())
}
