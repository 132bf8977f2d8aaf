//! Thin wrapper over rustfft with per-thread plan caching.
//!
//! Plans are cached in a thread-local map keyed by length, so concurrent
//! tasks never share mutable transform state.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place forward transform of a contiguous complex signal of length `n`.
pub fn forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place inverse transform (unnormalized, like the forward one).
pub fn inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Forward 2-d transform of a row-major `n x n` buffer, in place.
pub fn forward2(buf: &mut [Complex64], n: usize) {
    debug_assert_eq!(buf.len(), n * n);
    let p = plan(n, false);
    for row in buf.chunks_exact_mut(n) {
        p.process(row);
    }
    transpose(buf, n);
    for row in buf.chunks_exact_mut(n) {
        p.process(row);
    }
    transpose(buf, n);
}

/// Inverse 2-d transform of a row-major `n x n` buffer, in place (unnormalized).
pub fn inverse2(buf: &mut [Complex64], n: usize) {
    debug_assert_eq!(buf.len(), n * n);
    let p = plan(n, true);
    for row in buf.chunks_exact_mut(n) {
        p.process(row);
    }
    transpose(buf, n);
    for row in buf.chunks_exact_mut(n) {
        p.process(row);
    }
    transpose(buf, n);
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
