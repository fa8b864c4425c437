//! Fourier synthesis onto, and analysis from, the uniform periodic grid
//! `x_j = -π + 2πj/M` on `D = [-π, π]^3`.
//!
//! Grid values include the `(2π)^{-3/2}` normalization of the orthonormal
//! basis, so grid quadrature of `|u|²` over `D` equals the coefficient sum
//! without extra factors.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{HvError, Result};
use crate::fft::{freq_index, Fft3};
use crate::field::{Pair, SpectralField};
use crate::lattice::{dot, Lattice, WaveVector};

pub(crate) fn basis_norm() -> f64 {
    (2.0 * PI).powf(-1.5)
}

/// Smallest grid size that represents a degree-`n` field without loss.
pub fn min_grid_lossless(n: usize) -> usize {
    2 * n + 2
}

/// Smallest grid size on which quadratic products of degree-`n` fields are
/// alias-free on the retained modes.
pub fn min_grid_dealiased(n: usize) -> usize {
    3 * n + 2
}

/// Smallest 2,3,5-smooth size `>= min`, for fast transforms.
pub fn fft_friendly(min: usize) -> usize {
    (min..)
        .find(|&m| {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            r == 1
        })
        .expect("unbounded search")
}

/// Real vector field sampled on an `M^3` grid; point `(i, j, l)` sits at
/// `(-π + 2πi/M, -π + 2πj/M, -π + 2πl/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub m: usize,
    pub values: Vec<[f64; 3]>,
}

impl GridField {
    pub fn zeros(m: usize) -> Self {
        Self { m, values: vec![[0.0; 3]; m * m * m] }
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.m + j) * self.m + l
    }

    pub fn coord(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.m as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

fn parity_sign(k: WaveVector) -> f64 {
    if (k.kx + k.ky + k.kz).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn require_grid(m: usize, n: usize, required: usize) -> Result<()> {
    if m < required {
        return Err(HvError::Aliasing { m, n, required });
    }
    Ok(())
}

/// Complex synthesis of one field; returns the three component grids.
fn synthesize(f: &SpectralField, m: usize) -> [Vec<Complex64>; 3] {
    let mut fft = Fft3::new(m);
    let c = basis_norm();
    let mut comps: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); m * m * m]);
    for (i, mode) in f.modes().iter().enumerate() {
        let u = f.vector_coeff(i);
        let s = c * parity_sign(mode.k);
        let k = mode.k;
        let neg = k.neg();
        let pos_idx = (freq_index(k.kx, m) * m + freq_index(k.ky, m)) * m + freq_index(k.kz, m);
        let neg_idx = (freq_index(neg.kx, m) * m + freq_index(neg.ky, m)) * m + freq_index(neg.kz, m);
        for d in 0..3 {
            comps[d][pos_idx] += u[d] * s;
            comps[d][neg_idx] += u[d].conj() * s;
        }
    }
    for comp in comps.iter_mut() {
        fft.inverse(comp);
    }
    comps
}

/// Evaluate a spectral field on the `m^3` grid (requires `m >= 2n+2`).
pub fn to_physical(f: &SpectralField, m: usize) -> Result<GridField> {
    Ok(to_physical_with_residual(f, m)?.0)
}

/// As [`to_physical`], also returning the largest imaginary part produced by
/// the synthesis relative to the largest real value.
pub fn to_physical_with_residual(f: &SpectralField, m: usize) -> Result<(GridField, f64)> {
    require_grid(m, f.n(), min_grid_lossless(f.n()))?;
    let comps = synthesize(f, m);
    let mut g = GridField::zeros(m);
    let mut max_im = 0.0f64;
    for (p, v) in g.values.iter_mut().enumerate() {
        for d in 0..3 {
            v[d] = comps[d][p].re;
            max_im = max_im.max(comps[d][p].im.abs());
        }
    }
    let scale = g.max_abs();
    let rel = if scale > 0.0 { max_im / scale } else { max_im };
    Ok((g, rel))
}

/// Analyse a real grid field onto the half-lattice modes `|k| <= n`,
/// discarding the gradient (non-solenoidal) part.
pub fn to_spectral(g: &GridField, n: usize) -> Result<SpectralField> {
    let m = g.m;
    require_grid(m, n, min_grid_lossless(n))?;
    let lattice = Lattice::shared(n)?;
    let mut fft = Fft3::new(m);
    let mut comps: [Vec<Complex64>; 3] = std::array::from_fn(|d| {
        g.values.iter().map(|v| Complex64::new(v[d], 0.0)).collect()
    });
    for comp in comps.iter_mut() {
        fft.forward(comp);
    }
    let norm = 1.0 / (basis_norm() * (m * m * m) as f64);
    Ok(SpectralField::from_fn(lattice, |mode| {
        let k = mode.k;
        let idx = (freq_index(k.kx, m) * m + freq_index(k.ky, m)) * m + freq_index(k.kz, m);
        let s = norm * parity_sign(k);
        let v = [comps[0][idx] * s, comps[1][idx] * s, comps[2][idx] * s];
        frame_coords(&mode.frame.b1, &mode.frame.b2, &v)
    }))
}

/// Projection of a complex 3-vector onto a real orthonormal pair. Because
/// `b1, b2 ⊥ k`, this discards the component along `k`.
pub(crate) fn frame_coords(b1: &[f64; 3], b2: &[f64; 3], v: &[Complex64; 3]) -> Pair {
    [
        v[0] * b1[0] + v[1] * b1[1] + v[2] * b1[2],
        v[0] * b2[0] + v[1] * b2[1] + v[2] * b2[2],
    ]
}

/// `L_p` norm by grid quadrature, `p >= 2`. Exact for `p = 2` on any
/// admissible grid; for `p > 2` use `m >= 3n+2` and treat as approximate.
pub fn norm_lp(f: &SpectralField, p: f64, m: usize) -> Result<f64> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(HvError::Unsupported(format!("L_p norm requires 2 <= p < inf, got p = {p}")));
    }
    let g = to_physical(f, m)?;
    let cell = (2.0 * PI / m as f64).powi(3);
    let sum: f64 = g
        .values
        .iter()
        .map(|v| {
            let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if p == 2.0 {
                r2
            } else {
                r2.powf(p / 2.0)
            }
        })
        .sum();
    Ok((cell * sum).powf(1.0 / p))
}

/// Half-lattice complex vector coefficients, not necessarily solenoidal.
#[derive(Debug, Clone)]
pub struct VectorSpectrum {
    pub lattice: Arc<Lattice>,
    pub vecs: Vec<[Complex64; 3]>,
}

impl VectorSpectrum {
    /// Sample a conjugate-consistent full-lattice map on the stored modes.
    pub fn from_fn(lattice: Arc<Lattice>, f: impl Fn(WaveVector) -> [Complex64; 3]) -> Self {
        let vecs = lattice.modes().iter().map(|m| f(m.k)).collect();
        Self { lattice, vecs }
    }

    pub fn from_field(f: &SpectralField) -> Self {
        let vecs = (0..f.lattice().len()).map(|i| f.vector_coeff(i)).collect();
        Self { lattice: f.lattice().clone(), vecs }
    }

    /// Largest `|k·v| / |k|` over the stored modes.
    pub fn max_divergence(&self) -> f64 {
        self.lattice
            .modes()
            .iter()
            .zip(&self.vecs)
            .map(|(m, v)| {
                let k = m.k.as_f64();
                (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]).norm() / m.kabs
            })
            .fold(0.0, f64::max)
    }
}

/// Leray projection: per mode `v - (k·v) k / |k|²`, expressed in frame
/// coordinates.
pub fn leray_project(raw: &VectorSpectrum) -> SpectralField {
    let lattice = raw.lattice.clone();
    let mut idx = 0;
    SpectralField::from_fn(lattice, |mode| {
        let v = raw.vecs[idx];
        idx += 1;
        let k = mode.k.as_f64();
        let kv = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
        let w = [v[0] - kv * (k[0] / mode.k2), v[1] - kv * (k[1] / mode.k2), v[2] - kv * (k[2] / mode.k2)];
        debug_assert!(dot(&mode.frame.b1, &k).abs() < 1e-12 * mode.kabs);
        frame_coords(&mode.frame.b1, &mode.frame.b2, &w)
    })
}
