use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MeasureQuery, Neumaier};
use crate::error::Result;
use crate::spectral::Sign;

/// `n` values per parallel chunk; fixed so sums do not depend on thread count.
const CHUNK: u64 = 4096;

/// Length of `{ξ ≥ 0 : lo ≤ ξ² ≤ hi}` doubled for `±ξ`, written without
/// cancellation: `2(√hi − √lo) = 2(hi − lo)/(√hi + √lo)` once `lo > 0`.
#[inline]
fn root_band(lo: f64, hi: f64) -> f64 {
    if hi <= 0.0 || hi < lo {
        return 0.0;
    }
    if lo <= 0.0 {
        return 2.0 * hi.sqrt();
    }
    2.0 * (hi - lo) / (hi.sqrt() + lo.sqrt())
}

/// Section lengths at fixed `n`, split by branch. Hyperbolic: `(+, −)` for
/// `ξ² − A_n ∈ [C, C+K]` and `A_n − ξ² ∈ [C, C+K]`; elliptic: `(len, 0)` for
/// `ξ² + A_n ∈ [C, C+K]`. The shift `ξ₀` drops out.
pub fn section_branches(n: i64, q: &MeasureQuery) -> (f64, f64) {
    let a = q.a_n(n);
    match q.spec.sign {
        Sign::Hyperbolic => (root_band(a + q.c, a + q.c + q.k), root_band(a - q.c - q.k, a - q.c)),
        Sign::Elliptic => (root_band(q.c - a, q.c + q.k - a), 0.0),
    }
}

/// Total length of the `ξ`-section at `n`.
pub fn section_length(n: i64, q: &MeasureQuery) -> f64 {
    let (p, m) = section_branches(n, q);
    p + m
}

/// Lengths of the two covering sets of the hyperbolic − branch at `n`:
/// `|n−n₀|^{2α} − (C+K) ≤ ξ² ≤ |n|^{2α} − C` and the same with the roles swapped.
fn minus_cover(n: i64, q: &MeasureQuery) -> f64 {
    let p = 2.0 * q.spec.alpha;
    let a = (n as f64).abs().powf(p);
    let b = ((n - q.n0) as f64).abs().powf(p);
    root_band(b - q.c - q.k, a - q.c) + root_band(a - q.c - q.k, b - q.c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Exact (to rounding) sum of the sections with `|n| ≤ trunc_n`.
    pub lower: f64,
    /// `lower` plus a rigorous bound on the remaining sections; `+∞` when the
    /// tail diverges.
    pub upper: f64,
    pub divergent_tail: bool,
    /// `lower` split into the two hyperbolic branches (`minus_lower = 0` for elliptic).
    pub plus_lower: f64,
    pub minus_lower: f64,
    /// Hyperbolic − branch measured through its two covering sets, `|n| ≤ trunc_n`.
    pub minus_cover_lower: f64,
    /// Largest `|n|` whose section was summed exactly for `upper`.
    pub exact_through: u64,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    plus: Neumaier,
    minus: Neumaier,
    cover: Neumaier,
}

impl Sums {
    fn merge(&mut self, o: &Sums) {
        self.plus.add(o.plus.total());
        self.minus.add(o.minus.total());
        self.cover.add(o.cover.total());
    }
}

/// Sections for `lo ≤ |n| ≤ hi` (`n = 0` included when `lo = 0`), each `±n` pair
/// added together so that reflecting `n₀` gives bit-identical sums.
fn sum_range(q: &MeasureQuery, lo: u64, hi: u64, with_cover: bool) -> Sums {
    if lo > hi {
        return Sums::default();
    }
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    let parts: Vec<Sums> = starts
        .par_iter()
        .map(|&s| {
            let e = (s + CHUNK - 1).min(hi);
            let mut acc = Sums::default();
            for m in s..=e {
                let m = m as i64;
                let (p1, m1) = section_branches(m, q);
                if m == 0 {
                    acc.plus.add(p1);
                    acc.minus.add(m1);
                    if with_cover {
                        acc.cover.add(minus_cover(0, q));
                    }
                    continue;
                }
                let (p2, m2) = section_branches(-m, q);
                acc.plus.add(p1 + p2);
                acc.minus.add(m1 + m2);
                if with_cover {
                    acc.cover.add(minus_cover(m, q) + minus_cover(-m, q));
                }
            }
            acc
        })
        .collect();
    let mut total = Sums::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Smallest `M ≥ N` beyond which the hyperbolic tail bound applies: `M > |n₀|`
/// and `(M + 1 − |n₀|/2)^{2α} ≥ max(2C, C + K)`.
fn tail_start(q: &MeasureQuery) -> u64 {
    let half = q.n0.unsigned_abs() as f64 / 2.0;
    let need = (2.0 * q.c).max(q.c + q.k).powf(1.0 / (2.0 * q.spec.alpha));
    let m = (need + half - 1.0).ceil().max(0.0) as u64;
    q.trunc_n.max(m).max(q.n0.unsigned_abs() + 1)
}

/// Bound on `Σ_{|n|>M}` of the hyperbolic sections for `α > 1`.
///
/// For `|n| > M`, `A_n ≥ (|n| − |n₀|/2)^{2α}` (convexity) and `A_n ≥ max(2C, C+K)`,
/// so the + branch is `≤ K/√A_n` and the − branch `≤ 2K/√(A_n − C) ≤ 2√2·K/√A_n`.
/// The decreasing majorant `(1+2√2)K(z − |n₀|/2)^{−α}` is then summed over both
/// signs of `n` by integral comparison.
fn hyperbolic_tail(q: &MeasureQuery, m: u64) -> f64 {
    let a = q.spec.alpha;
    let half = q.n0.unsigned_abs() as f64 / 2.0;
    2.0 * (1.0 + 2.0 * std::f64::consts::SQRT_2) * q.k * (m as f64 - half).powf(1.0 - a) / (a - 1.0)
}

/// Largest `|n|` with a non-empty elliptic section: `A_n ≤ C + K` forces
/// `|n| ≤ (C+K)^{1/2α} + |n₀|/2`.
fn elliptic_support(q: &MeasureQuery) -> u64 {
    let half = q.n0.unsigned_abs() as f64 / 2.0;
    ((q.c + q.k).powf(1.0 / (2.0 * q.spec.alpha)) + half).floor() as u64
}

/// Enclosure `[lower, upper]` of the measure of the shell selected by `q`.
pub fn measure_set(q: &MeasureQuery) -> Result<MeasureResult> {
    q.validate()?;
    let n = q.trunc_n;
    let hyper = q.spec.sign == Sign::Hyperbolic;
    let head = sum_range(q, 0, n, hyper);
    let (plus, minus) = (head.plus.total(), head.minus.total());
    let lower = plus + minus;
    let (upper, divergent_tail, exact_through) = match q.spec.sign {
        Sign::Elliptic => {
            let top = elliptic_support(q);
            let extra = sum_range(q, n + 1, top, false);
            (lower + extra.plus.total(), false, top.max(n))
        }
        Sign::Hyperbolic if q.spec.alpha <= 1.0 => (f64::INFINITY, true, n),
        Sign::Hyperbolic => {
            let m = tail_start(q);
            let extra = sum_range(q, n + 1, m, false);
            let exact = lower + extra.plus.total() + extra.minus.total();
            (exact + hyperbolic_tail(q, m), false, m)
        }
    };
    Ok(MeasureResult {
        lower,
        upper,
        divergent_tail,
        plus_lower: plus,
        minus_lower: minus,
        minus_cover_lower: head.cover.total(),
        exact_through,
    })
}

/// `h(l) = Σ_{|n| ≤ n_max} 2√(A_n + l)`, the measure of `{ξ² − A_n ≤ l}`
/// restricted to `|n| ≤ n_max`. For the hyperbolic + branch,
/// `h(C+K) − h(C)` equals `plus_lower` with `trunc_n = n_max`.
pub fn h_function(l: f64, q: &MeasureQuery, n_max: u64) -> f64 {
    let mut acc = Neumaier::default();
    let n_max = n_max as i64;
    for n in -n_max..=n_max {
        acc.add(2.0 * (q.a_n(n) + l).sqrt());
    }
    acc.total()
}
