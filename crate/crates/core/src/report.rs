//! Rows produced by the inequality probes, with CSV and JSON writers.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, Sign, SymbolSpec};

/// One probe evaluation: inputs, the two norms and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe_id: String,
    pub alpha: f64,
    pub sign: Sign,
    pub b: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "K1")]
    pub k1: Option<f64>,
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    /// Half-length of the time window.
    pub delta: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    #[serde(rename = "Nt")]
    pub nt: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    pub data_kind: String,
    pub seed: Option<u64>,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    pub outside_hypotheses: bool,
}

impl ProbeReport {
    pub(crate) fn new(
        probe: &str,
        spec: &SymbolSpec,
        grid: &Grid,
        window_length: f64,
        nt: usize,
        numerator: f64,
        denominator: f64,
    ) -> Self {
        Self {
            probe_id: probe.to_string(),
            alpha: spec.alpha,
            sign: spec.sign,
            b: None,
            s: None,
            k1: None,
            k2: None,
            delta: 0.5 * window_length,
            nx: grid.nx(),
            ny: grid.ny(),
            nt,
            lx: grid.lx(),
            data_kind: "user".to_string(),
            seed: None,
            numerator,
            denominator,
            ratio: numerator / denominator,
            outside_hypotheses: !spec.within_hypotheses(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.probe_id = id.into();
        self
    }

    pub fn with_data(mut self, kind: impl Into<String>, seed: Option<u64>) -> Self {
        self.data_kind = kind.into();
        self.seed = seed;
        self
    }
}

/// Sort by `probe_id`, the canonical aggregation order.
pub fn sort_reports(reports: &mut [ProbeReport]) {
    reports.sort_by(|a, b| a.probe_id.cmp(&b.probe_id));
}

pub fn write_probe_csv<W: Write>(w: W, reports: &[ProbeReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if reports.is_empty() {
        return Err(Error::InvalidParameter("no probe reports to write".into()));
    }
    for r in reports {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_probe_json<W: Write>(w: W, reports: &[ProbeReport]) -> Result<()> {
    serde_json::to_writer_pretty(w, reports)?;
    Ok(())
}

/// Largest ratio, or `None` for an empty set.
pub fn max_ratio<'a, I: IntoIterator<Item = &'a ProbeReport>>(reports: I) -> Option<f64> {
    reports.into_iter().map(|r| r.ratio).reduce(f64::max)
}
