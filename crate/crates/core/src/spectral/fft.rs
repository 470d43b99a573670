//! Thin axis-wise wrappers around `rustfft`.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array, Axis, Dimension, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plan pair for one transform length.
#[derive(Clone)]
pub(crate) struct PlanPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl PlanPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }
}

impl fmt::Debug for PlanPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlanPair(len={})", self.len())
    }
}

/// Unnormalized in-place transform of every lane along `axis`.
pub(crate) fn transform_axis<D: Dimension>(data: &mut Array<Complex64, D>, axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let len = data.len_of(Axis(axis));
    debug_assert_eq!(len, fft.len());
    if len <= 1 {
        return;
    }
    let last = data.ndim() - 1;
    if axis == last && data.is_standard_layout() {
        let slice = data.as_slice_mut().expect("standard layout");
        let chunk = len * 64;
        use rayon::prelude::*;
        slice.par_chunks_mut(chunk).for_each(|c| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(c, &mut scratch);
        });
        return;
    }
    Zip::from(data.lanes_mut(Axis(axis))).par_for_each(|mut lane| {
        let mut buf: Vec<Complex64> = lane.iter().copied().collect();
        fft.process(&mut buf);
        for (dst, src) in lane.iter_mut().zip(buf) {
            *dst = src;
        }
    });
}

/// Signed frequency index of FFT-order position `i` for a length-`n` transform:
/// `0, 1, …, ⌈n/2⌉−1, −⌊n/2⌋, …, −1`.
#[inline]
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
