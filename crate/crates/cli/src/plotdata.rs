//! Tidy long-format CSV for external plotting. Nothing is rendered here.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fnls_core::measure::MeasureRow;
use fnls_core::report::ProbeReport;
use fnls_core::solver::DiagnosticRow;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    RatioVsK,
    RatioVsC,
    RatioVsN,
    SeriesVsN,
    MassVsT,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::RatioVsK => "plot_ratio_vs_K.csv",
            PlotKind::RatioVsC => "plot_ratio_vs_C.csv",
            PlotKind::RatioVsN => "plot_ratio_vs_N.csv",
            PlotKind::SeriesVsN => "plot_series_vs_N.csv",
            PlotKind::MassVsT => "plot_mass_vs_t.csv",
        }
    }
}

/// One point: the coordinates that apply to it and the plotted value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub alpha: f64,
    pub sign: String,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub t: Option<f64>,
    pub label: String,
    pub value: f64,
}

impl PlotPoint {
    fn bare(alpha: f64, sign: impl ToString, label: impl Into<String>, value: f64) -> Self {
        Self {
            alpha,
            sign: sign.to_string(),
            k: None,
            c: None,
            n: None,
            t: None,
            label: label.into(),
            value,
        }
    }

    pub fn from_measure(r: &MeasureRow) -> Self {
        Self {
            k: Some(r.k),
            c: Some(r.c),
            ..Self::bare(r.alpha, r.sign, format!("n0={}", r.n0), r.ratio_upper_over_k)
        }
    }

    /// Bilinear rows plot against `K1` with `K2` in the label; sweep rows
    /// against the truncation `N = Nx/4`.
    pub fn from_probe(r: &ProbeReport) -> Self {
        let kind = r.probe_id.split('/').next().unwrap_or_default();
        match (r.k1, r.k2) {
            (Some(k1), Some(k2)) => Self {
                k: Some(k1),
                ..Self::bare(r.alpha, r.sign, format!("{kind} K2={k2}"), r.ratio)
            },
            _ => Self {
                n: Some((r.nx / 4) as f64),
                ..Self::bare(r.alpha, r.sign, format!("{kind} {}", r.data_kind), r.ratio)
            },
        }
    }

    pub fn from_series(alpha: f64, kind: &str, c: f64, k: f64, n: u64, partial: f64) -> Self {
        Self {
            k: Some(k),
            c: Some(c),
            n: Some(n as f64),
            ..Self::bare(alpha, "", kind, partial)
        }
    }

    pub fn from_diagnostic(alpha: f64, sign: impl ToString, r: &DiagnosticRow) -> Self {
        Self {
            t: Some(r.t),
            ..Self::bare(alpha, sign, "mass", r.mass)
        }
    }

    fn key(&self) -> [f64; 5] {
        let o = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
        [self.alpha, o(self.k), o(self.c), o(self.n), o(self.t)]
    }
}

/// Write `points` sorted by `(alpha, K, C, N, t, label)` to `dir/<kind file>`.
pub fn emit_plotdata(points: &[PlotPoint], kind: PlotKind, dir: &Path) -> anyhow::Result<PathBuf> {
    if points.is_empty() {
        bail!("no reports to emit plot data from");
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.key()
            .iter()
            .zip(b.key().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    });
    let path = dir.join(kind.file_name());
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for p in &sorted {
        w.serialize(p)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fnls_core::measure::MeasureQuery;
    use fnls_core::spectral::SymbolSpec;

    fn row(alpha: f64, c: f64, k: f64) -> MeasureRow {
        let q = MeasureQuery::new(SymbolSpec::hyperbolic(alpha).unwrap(), 0.0, 0, c, k, 4).unwrap();
        MeasureRow::from_query(&q).unwrap()
    }

    #[test]
    fn single_report_single_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = emit_plotdata(
            &[PlotPoint::from_measure(&row(2.0, 1.0, 1.0))],
            PlotKind::RatioVsK,
            dir.path(),
        )
        .unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "alpha,sign,K,C,N,t,label,value");
        assert!(lines[1].starts_with("2.0,hyperbolic,1.0,1.0,,,n0=0,"));
    }

    #[test]
    fn scan_rows_sorted_by_alpha_k_c() {
        let mut pts = Vec::new();
        for alpha in [2.0, 1.5] {
            for c in [10.0, 1.0] {
                for k in [4.0, 1.0, 2.0] {
                    pts.push(PlotPoint::from_measure(&row(alpha, c, k)));
                }
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let path = emit_plotdata(&pts, PlotKind::RatioVsC, dir.path()).unwrap();
        let mut rdr = csv::Reader::from_path(path).unwrap();
        let keys: Vec<(f64, f64, f64)> = rdr
            .records()
            .map(|r| {
                let r = r.unwrap();
                (r[0].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap())
            })
            .collect();
        assert_eq!(keys.len(), 12);
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(keys[0], (1.5, 1.0, 1.0));
        assert_eq!(keys[11], (2.0, 4.0, 10.0));
    }

    #[test]
    fn empty_input_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plotdata(&[], PlotKind::MassVsT, dir.path()).unwrap_err();
        assert!(err.to_string().contains("no reports"));
        assert!(!dir.path().join(PlotKind::MassVsT.file_name()).exists());
    }
}
