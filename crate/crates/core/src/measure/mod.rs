//! Enclosures of the product measure (Lebesgue in ξ, counting in n) of the
//! sublevel shells of `(ξ − ξ₀)² ∓ A_n`, `A_n = ½(|n|^{2α} + |n − n₀|^{2α})`,
//! together with the series and integrals that bound them.

mod bounds;
mod scan;
mod series;
mod set;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Sign, SymbolSpec};

pub use bounds::{j2_majorant_constant, proof_bounds, ProofBounds};
pub use scan::{ratio_scan, upward_drift, write_measure_csv, MeasureRow, ScanGrid, ScanTable};
pub use series::{series_partial, SeriesKind};
pub use set::{h_function, measure_set, section_branches, section_length, MeasureResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureQuery {
    pub spec: SymbolSpec,
    pub xi0: f64,
    pub n0: i64,
    pub c: f64,
    pub k: f64,
    /// Lattice cutoff: `lower` sums the sections with `|n| ≤ trunc_n`.
    pub trunc_n: u64,
}

impl MeasureQuery {
    pub fn new(spec: SymbolSpec, xi0: f64, n0: i64, c: f64, k: f64, trunc_n: u64) -> Result<Self> {
        let q = Self {
            spec,
            xi0,
            n0,
            c,
            k,
            trunc_n,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.xi0.is_finite() {
            return Err(Error::InvalidParameter("xi0 must be finite".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.k.is_finite() && self.k >= 1.0) {
            return Err(Error::InvalidParameter(format!("K must be at least 1, got {}", self.k)));
        }
        if self.spec.sign == Sign::Elliptic && self.c < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "the elliptic set needs C ≥ 1, got {}",
                self.c
            )));
        }
        Ok(())
    }

    /// `A_n = ½(|n|^{2α} + |n − n₀|^{2α})`.
    #[inline]
    pub fn a_n(&self, n: i64) -> f64 {
        let p = 2.0 * self.spec.alpha;
        0.5 * ((n as f64).abs().powf(p) + ((n - self.n0) as f64).abs().powf(p))
    }

    /// Whether the measure bounds are known to hold for these parameters.
    pub fn within_hypotheses(&self) -> bool {
        self.spec.within_hypotheses()
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_validation() {
        let h = SymbolSpec::hyperbolic(2.0).unwrap();
        let e = SymbolSpec::elliptic(2.0).unwrap();
        assert!(MeasureQuery::new(h, 0.0, 0, 0.1, 1.0, 10).is_ok());
        assert!(MeasureQuery::new(e, 0.0, 0, 0.1, 1.0, 10).is_err());
        assert!(MeasureQuery::new(h, 0.0, 0, 1.0, 0.5, 10).is_err());
        assert!(MeasureQuery::new(h, 0.0, 0, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn compensated_sum() {
        let mut s = Neumaier::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.total(), 2.0);
    }
}
