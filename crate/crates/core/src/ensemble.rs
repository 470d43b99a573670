//! Seeded random data for ensembles. Member `i` of a run with seed `s` draws
//! from a ChaCha8 stream keyed by `s ⊕ i`, so members are independent of the
//! order in which they are generated.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectral::{Field, Grid, Representation};

pub fn member_rng(seed: u64, member: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ member)
}

/// Standard complex normal (unit variance).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Spectral field whose coefficient at `(j, n)` is `g·amp(j, n)` with `g`
/// complex normal. Coefficients are drawn in storage order for every mode,
/// including those with zero amplitude.
pub fn random_spectrum<R, A>(grid: &Arc<Grid>, rng: &mut R, amp: A) -> Field
where
    R: Rng + ?Sized,
    A: Fn(i64, i64) -> f64,
{
    let mut f = Field::zeros(grid, Representation::Spectral);
    for ((i, l), c) in f.data_mut().indexed_iter_mut() {
        let g = complex_normal(rng);
        *c = g * amp(grid.mode_x(i), grid.mode_y(l));
    }
    f
}

/// Gaussian coefficients on the block `|j| < max_j, |n| < max_n`, rescaled to
/// unit `L²` norm.
pub fn gaussian_block<R: Rng + ?Sized>(grid: &Arc<Grid>, rng: &mut R, max_j: i64, max_n: i64) -> Field {
    let f = random_spectrum(
        grid,
        rng,
        |j, n| {
            if j.abs() < max_j && n.abs() < max_n {
                1.0
            } else {
                0.0
            }
        },
    );
    normalized(f)
}

/// Smooth random data: coefficient envelope `exp(−(j/wj)² − (n/wn)²)`, unit `L²`
/// norm.
pub fn smooth_random<R: Rng + ?Sized>(grid: &Arc<Grid>, rng: &mut R, wj: f64, wn: f64) -> Field {
    let f = random_spectrum(grid, rng, |j, n| {
        let (a, b) = (j as f64 / wj, n as f64 / wn);
        (-(a * a + b * b)).exp()
    });
    normalized(f)
}

fn normalized(f: Field) -> Field {
    let norm = f.norm_l2();
    if norm > 0.0 {
        f.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        f
    }
}
