//! The quadratic terms `P[(v·∇)ξ]` (transport) and `P[(ξ·∇)v]` (stretching).
//!
//! The FFT path evaluates the product tensor `T_ij = v_i ξ_j` on a padded
//! grid with `M >= 3n+2` points per dimension, so the retained modes
//! `|k| <= n` are free of aliasing. Both fields are solenoidal, hence
//! `(v·∇)ξ_i = ∂_j T_ji` and `(ξ·∇)v_i = ∂_j T_ij`: one set of nine products
//! yields both terms. [`exact_convolution`] is the direct mode-pair sum used
//! as the reference.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid_arg, HvError, Result};
use crate::fft::{freq_index, Fft3};
use crate::field::SpectralField;
use crate::lattice::{Lattice, Slot, WaveVector};
use crate::transform::{basis_norm, fft_friendly, frame_coords, min_grid_dealiased};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest truncation accepted by [`exact_convolution`].
pub const CONVOLUTION_MAX_N: usize = 6;

/// Scratch and transform plans for dealiased products at one truncation.
///
/// Holds mutable buffers: one plan per worker thread.
#[derive(Debug, Clone)]
pub struct PaddedProductPlan {
    n: usize,
    m: usize,
    lattice: Arc<Lattice>,
    fft: Fft3,
    pos_idx: Vec<usize>,
    neg_idx: Vec<usize>,
    packed_in: [Vec<Complex64>; 3],
    packed_out: [Vec<Complex64>; 5],
}

impl PaddedProductPlan {
    /// Plan on the smallest FFT-friendly grid with `M >= 3n+2`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_grid(n, fft_friendly(min_grid_dealiased(n)))
    }

    pub fn with_grid(n: usize, m: usize) -> Result<Self> {
        let required = min_grid_dealiased(n);
        if m < required {
            return Err(HvError::Aliasing { m, n, required });
        }
        let lattice = Lattice::shared(n)?;
        let index = |k: WaveVector| (freq_index(k.kx, m) * m + freq_index(k.ky, m)) * m + freq_index(k.kz, m);
        let pos_idx = lattice.modes().iter().map(|md| index(md.k)).collect();
        let neg_idx = lattice.modes().iter().map(|md| index(md.k.neg())).collect();
        let len = m * m * m;
        Ok(Self {
            n,
            m,
            lattice,
            fft: Fft3::new(m),
            pos_idx,
            neg_idx,
            packed_in: std::array::from_fn(|_| vec![ZERO; len]),
            packed_out: std::array::from_fn(|_| vec![ZERO; len]),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.n() != self.n {
            return Err(HvError::TruncationMismatch { expected: self.n, got: f.n() });
        }
        Ok(())
    }

    /// `(P[(a·∇)b], P[(b·∇)a])` for solenoidal `a`, `b`, truncated to `|k| <= n`.
    pub fn product_pair(&mut self, a: &SpectralField, b: &SpectralField) -> Result<(SpectralField, SpectralField)> {
        self.check(a)?;
        self.check(b)?;
        let c = basis_norm();
        for buf in self.packed_in.iter_mut() {
            buf.fill(ZERO);
        }
        // Pack the six real component grids into three complex transforms:
        // (a0 + i a1), (a2 + i b0), (b1 + i b2).
        for i in 0..self.lattice.len() {
            let ua = a.vector_coeff(i);
            let ub = b.vector_coeff(i);
            let comps = [ua[0], ua[1], ua[2], ub[0], ub[1], ub[2]];
            let (p, q) = (self.pos_idx[i], self.neg_idx[i]);
            for slot in 0..3 {
                let x = comps[2 * slot] * c;
                let y = comps[2 * slot + 1] * c;
                self.packed_in[slot][p] += x + I * y;
                self.packed_in[slot][q] += x.conj() + I * y.conj();
            }
        }
        for buf in self.packed_in.iter_mut() {
            self.fft.inverse(buf);
        }
        let len = self.m * self.m * self.m;
        let [g0, g1, g2] = &self.packed_in;
        // Products T_ij = a_i b_j, packed in pairs:
        // (T00,T01) (T02,T10) (T11,T12) (T20,T21) (T22,0)
        let [o0, o1, o2, o3, o4] = &mut self.packed_out;
        for p in 0..len {
            let (a0, a1) = (g0[p].re, g0[p].im);
            let (a2, b0) = (g1[p].re, g1[p].im);
            let (b1, b2) = (g2[p].re, g2[p].im);
            o0[p] = Complex64::new(a0 * b0, a0 * b1);
            o1[p] = Complex64::new(a0 * b2, a1 * b0);
            o2[p] = Complex64::new(a1 * b1, a1 * b2);
            o3[p] = Complex64::new(a2 * b0, a2 * b1);
            o4[p] = Complex64::new(a2 * b2, 0.0);
        }
        for buf in self.packed_out.iter_mut() {
            self.fft.forward(buf);
        }
        let norm = 1.0 / (c * len as f64);
        let unpack = |buf: &Vec<Complex64>, p: usize, q: usize| -> (Complex64, Complex64) {
            let zp = buf[p];
            let zq = buf[q].conj();
            ((zp + zq) * 0.5 * norm, (zp - zq) * (-0.5 * norm) * I)
        };
        let mut adv_ab = Vec::with_capacity(self.lattice.len());
        let mut adv_ba = Vec::with_capacity(self.lattice.len());
        for (i, mode) in self.lattice.modes().iter().enumerate() {
            let (p, q) = (self.pos_idx[i], self.neg_idx[i]);
            let (t00, t01) = unpack(&self.packed_out[0], p, q);
            let (t02, t10) = unpack(&self.packed_out[1], p, q);
            let (t11, t12) = unpack(&self.packed_out[2], p, q);
            let (t20, t21) = unpack(&self.packed_out[3], p, q);
            let (t22, _) = unpack(&self.packed_out[4], p, q);
            let t = [[t00, t01, t02], [t10, t11, t12], [t20, t21, t22]];
            let k = mode.k.as_f64();
            let ik = [I * k[0], I * k[1], I * k[2]];
            // (a·∇)b_i = ∂_j T_ji ; (b·∇)a_i = ∂_j T_ij
            let mut ab = [ZERO; 3];
            let mut ba = [ZERO; 3];
            for d in 0..3 {
                for j in 0..3 {
                    ab[d] += ik[j] * t[j][d];
                    ba[d] += ik[j] * t[d][j];
                }
            }
            adv_ab.push(frame_coords(&mode.frame.b1, &mode.frame.b2, &ab));
            adv_ba.push(frame_coords(&mode.frame.b1, &mode.frame.b2, &ba));
        }
        Ok((
            SpectralField::from_coeffs(self.lattice.clone(), adv_ab)?,
            SpectralField::from_coeffs(self.lattice.clone(), adv_ba)?,
        ))
    }

    /// `P[(a·∇)b]`.
    pub fn advect(&mut self, a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
        Ok(self.product_pair(a, b)?.0)
    }

    /// Transport and stretching terms together for vorticity `xi` and velocity `v`:
    /// `(P[(v·∇)ξ], P[(ξ·∇)v])`.
    pub fn vorticity_terms(&mut self, xi: &SpectralField, v: &SpectralField) -> Result<(SpectralField, SpectralField)> {
        self.product_pair(v, xi)
    }
}

/// `B₁(v, ξ) = P[(v·∇)ξ]`.
pub fn transport_term(v: &SpectralField, xi: &SpectralField, plan: &mut PaddedProductPlan) -> Result<SpectralField> {
    plan.advect(v, xi)
}

/// `B₂(ξ, v) = P[(ξ·∇)v]`.
pub fn stretching_term(xi: &SpectralField, v: &SpectralField, plan: &mut PaddedProductPlan) -> Result<SpectralField> {
    plan.advect(xi, v)
}

/// Which quadratic term [`exact_convolution`] evaluates for a
/// (vorticity, velocity) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductForm {
    /// `P[(v·∇)ξ]`
    Transport,
    /// `P[(ξ·∇)v]`
    Stretching,
}

/// Direct double sum over mode pairs for the vorticity `xi` and velocity `v`.
pub fn exact_convolution(xi: &SpectralField, v: &SpectralField, form: ProductForm) -> Result<SpectralField> {
    match form {
        ProductForm::Transport => exact_advection(v, xi),
        ProductForm::Stretching => exact_advection(xi, v),
    }
}

/// `P[(a·∇)b]` by direct convolution: for every retained `k`,
/// `(2π)^{-3/2} Σ_{p+q=k} i (q·A_p) B_q`, then Leray projection.
pub fn exact_advection(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_same_truncation(b)?;
    let n = a.n();
    if n > CONVOLUTION_MAX_N {
        return Err(invalid_arg(format!(
            "exact convolution limited to n <= {CONVOLUTION_MAX_N} (got {n})"
        )));
    }
    let lattice = a.lattice().clone();
    let full: Vec<(WaveVector, [Complex64; 3])> = lattice
        .modes()
        .iter()
        .enumerate()
        .flat_map(|(i, m)| {
            let u = a.vector_coeff(i);
            [(m.k, u), (m.k.neg(), u.map(|z| z.conj()))]
        })
        .collect();
    let c = basis_norm();
    let b_vec = |q: WaveVector| -> Option<[Complex64; 3]> {
        match lattice.slot(q)? {
            Slot::Stored(i) => Some(b.vector_coeff(i)),
            Slot::Conjugate(i) => Some(b.vector_coeff(i).map(|z| z.conj())),
        }
    };
    let coeffs = lattice
        .modes()
        .iter()
        .map(|mode| {
            let k = mode.k;
            let mut acc = [ZERO; 3];
            for (p, ap) in &full {
                let q = WaveVector { kx: k.kx - p.kx, ky: k.ky - p.ky, kz: k.kz - p.kz };
                if q.norm_sq() == 0 {
                    continue;
                }
                let Some(bq) = b_vec(q) else { continue };
                let qv = q.as_f64();
                let q_dot_a = ap[0] * qv[0] + ap[1] * qv[1] + ap[2] * qv[2];
                let s = I * q_dot_a * c;
                for d in 0..3 {
                    acc[d] += s * bq[d];
                }
            }
            frame_coords(&mode.frame.b1, &mode.frame.b2, &acc)
        })
        .collect();
    SpectralField::from_coeffs(lattice, coeffs)
}
