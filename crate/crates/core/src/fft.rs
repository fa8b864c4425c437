//! Cubic 3D complex FFT built from batched 1D transforms along the
//! contiguous axis followed by an axis rotation.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub(crate) struct Fft3 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    rotated: Vec<Complex64>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("m", &self.m).finish()
    }
}

impl Fft3 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            m,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            rotated: vec![Complex64::new(0.0, 0.0); m * m * m],
        }
    }

    pub fn len(&self) -> usize {
        self.m * self.m * self.m
    }

    /// Unnormalized `Σ_j x_j e^{-2πi k·j/M}`.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let plan = self.fwd.clone();
        self.run(data, plan.as_ref());
    }

    /// Unnormalized `Σ_k X_k e^{+2πi k·j/M}`.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let plan = self.inv.clone();
        self.run(data, plan.as_ref());
    }

    fn run(&mut self, data: &mut [Complex64], plan: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.len());
        let m = self.m;
        for _ in 0..3 {
            plan.process_with_scratch(data, &mut self.scratch);
            // (a, b, c) -> (c, a, b)
            for a in 0..m {
                for b in 0..m {
                    let src = &data[(a * m + b) * m..(a * m + b + 1) * m];
                    for (c, v) in src.iter().enumerate() {
                        self.rotated[(c * m + a) * m + b] = *v;
                    }
                }
            }
            data.copy_from_slice(&self.rotated);
        }
    }
}

/// Index of signed frequency `k` on an `m`-point periodic axis.
#[inline]
pub(crate) fn freq_index(k: i32, m: usize) -> usize {
    k.rem_euclid(m as i32) as usize
}
