//! The fractional dispersion law `ω(ξ, n) = ξ² ± |n|^{2α}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the fractional part of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `ω = ξ² + |n|^{2α}`.
    Elliptic,
    /// `ω = ξ² − |n|^{2α}`.
    Hyperbolic,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Elliptic => 1.0,
            Sign::Hyperbolic => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Elliptic => "elliptic",
            Sign::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "elliptic" | "+" | "plus" => Ok(Sign::Elliptic),
            "hyperbolic" | "-" | "minus" => Ok(Sign::Hyperbolic),
            other => Err(Error::InvalidParameter(format!(
                "unknown sign {other:?} (expected elliptic or hyperbolic)"
            ))),
        }
    }
}

/// Exponent and sign of the dispersion symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub alpha: f64,
    pub sign: Sign,
}

impl SymbolSpec {
    pub fn new(alpha: f64, sign: Sign) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive finite number, got {alpha}"
            )));
        }
        Ok(Self { alpha, sign })
    }

    pub fn elliptic(alpha: f64) -> Result<Self> {
        Self::new(alpha, Sign::Elliptic)
    }

    pub fn hyperbolic(alpha: f64) -> Result<Self> {
        Self::new(alpha, Sign::Hyperbolic)
    }

    /// `|η|^{2α}` for a (possibly non-integer) transverse frequency.
    #[inline]
    pub fn fractional_part(&self, eta: f64) -> f64 {
        eta.abs().powf(2.0 * self.alpha)
    }

    /// `ω(ξ, η)` for a real transverse frequency; the planar configuration uses this directly.
    #[inline]
    pub fn omega(&self, xi: f64, eta: f64) -> f64 {
        xi * xi + self.sign.factor() * self.fractional_part(eta)
    }

    /// `ω(ξ, n) = ξ² ± |n|^{2α}` on the torus lattice.
    #[inline]
    pub fn dispersion(&self, xi: f64, n: i64) -> f64 {
        self.omega(xi, n as f64)
    }

    /// Whether the Strichartz/bilinear machinery is known to apply:
    /// `α ≥ 1` for the elliptic sign, `α > 1` for the hyperbolic sign.
    pub fn within_hypotheses(&self) -> bool {
        match self.sign {
            Sign::Elliptic => self.alpha >= 1.0,
            Sign::Hyperbolic => self.alpha > 1.0,
        }
    }
}

/// Free-function form of [`SymbolSpec::dispersion`].
pub fn dispersion(spec: &SymbolSpec, xi: f64, n: i64) -> f64 {
    spec.dispersion(xi, n)
}
