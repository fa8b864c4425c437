//! Divergence-free, mean-free vector fields stored by their frame
//! coordinates on the half-lattice.
//!
//! The basis is orthonormal: `(2π)^{-3/2} b_{k,j} e^{ik·x}`. All inner
//! products and Sobolev norms are therefore plain coefficient sums over the
//! full lattice, with the conjugate modes `u_{-k,j} = -conj(u_{k,j})`
//! counted explicitly.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid_arg, HvError, Result};
use crate::lattice::{Lattice, Mode, Slot, WaveVector};

/// Frame coordinates `(u1, u2)` of one mode.
pub type Pair = [Complex64; 2];

pub const ZERO_PAIR: Pair = [Complex64::new(0.0, 0.0); 2];

/// Header line of the mode-table CSV format.
pub const FIELD_CSV_HEADER: &str = "kx,ky,kz,u1_re,u1_im,u2_re,u2_im";

#[derive(Debug, Clone)]
pub struct SpectralField {
    lattice: Arc<Lattice>,
    coeffs: Vec<Pair>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(n: usize) -> Result<Self> {
        Ok(Self::zeros_on(Lattice::shared(n)?))
    }

    pub fn zeros_on(lattice: Arc<Lattice>) -> Self {
        let coeffs = vec![ZERO_PAIR; lattice.len()];
        Self { lattice, coeffs }
    }

    pub fn from_coeffs(lattice: Arc<Lattice>, coeffs: Vec<Pair>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(invalid_arg(format!(
                "expected {} mode coefficients for n = {}, got {}",
                lattice.len(),
                lattice.n(),
                coeffs.len()
            )));
        }
        Ok(Self { lattice, coeffs })
    }

    /// Build a field mode by mode.
    pub fn from_fn(lattice: Arc<Lattice>, mut f: impl FnMut(&Mode) -> Pair) -> Self {
        let coeffs = lattice.modes().iter().map(&mut f).collect();
        Self { lattice, coeffs }
    }

    /// A field holding one half-lattice (or conjugate) mode.
    pub fn single_mode(n: usize, k: WaveVector, pair: Pair) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        match f.lattice.slot(k) {
            Some(Slot::Stored(i)) => f.coeffs[i] = pair,
            Some(Slot::Conjugate(i)) => f.coeffs[i] = [-pair[0].conj(), -pair[1].conj()],
            None => return Err(invalid_arg(format!("mode {k} lies outside truncation n = {n}"))),
        }
        Ok(f)
    }

    /// Independent complex Gaussian coefficients scaled per mode by
    /// `amplitude(|k|)`; real and imaginary parts are standard normal.
    pub fn random<R: Rng + ?Sized>(lattice: Arc<Lattice>, rng: &mut R, amplitude: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(lattice, |m| {
            let a = amplitude(m.kabs);
            let mut p = ZERO_PAIR;
            for z in p.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = Complex64::new(a * re, a * im);
            }
            p
        })
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn modes(&self) -> &[Mode] {
        self.lattice.modes()
    }

    pub fn coeffs(&self) -> &[Pair] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Pair] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Pair> {
        self.coeffs
    }

    /// Frame coordinates at any full-lattice wavevector (zero outside the
    /// truncation).
    pub fn get(&self, k: WaveVector) -> Pair {
        match self.lattice.slot(k) {
            Some(Slot::Stored(i)) => self.coeffs[i],
            Some(Slot::Conjugate(i)) => {
                let p = self.coeffs[i];
                [-p[0].conj(), -p[1].conj()]
            }
            None => ZERO_PAIR,
        }
    }

    /// Complex vector coefficient `u1 b1 + u2 b2` of a stored mode.
    pub fn vector_coeff(&self, i: usize) -> [Complex64; 3] {
        let m = &self.lattice.modes()[i];
        let p = self.coeffs[i];
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (d, o) in out.iter_mut().enumerate() {
            *o = p[0] * m.frame.b1[d] + p[1] * m.frame.b2[d];
        }
        out
    }

    pub fn check_same_truncation(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(HvError::TruncationMismatch { expected: self.n(), got: other.n() });
        }
        Ok(())
    }

    /// Apply a per-mode map.
    pub fn map_modes(&self, mut f: impl FnMut(&Mode, Pair) -> Pair) -> Self {
        let coeffs = self.lattice.modes().iter().zip(&self.coeffs).map(|(m, p)| f(m, *p)).collect();
        Self { lattice: self.lattice.clone(), coeffs }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_modes(|_, p| [p[0] * s, p[1] * s])
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.n(), other.n());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a[0] += b[0] * s;
            a[1] += b[1] * s;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// L2 inner product over the full lattice.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n(), other.n());
        2.0 * self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a[0] * b[0].conj() + a[1] * b[1].conj()).re)
            .sum::<f64>()
    }

    /// `Σ_k |k|^{2a} (|u1|² + |u2|²)` over the full lattice.
    pub fn sobolev_sq(&self, a: f64) -> f64 {
        2.0 * self
            .lattice
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, p)| m.k2.powf(a) * (p[0].norm_sqr() + p[1].norm_sqr()))
            .sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_sq(0.0).sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|p| p[0].norm().max(p[1].norm())).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs_coeff()
    }

    /// `‖self - other‖ / max(‖other‖, tiny)` in L2.
    pub fn rel_l2_diff(&self, other: &Self) -> f64 {
        self.sub(other).l2_norm() / other.l2_norm().max(f64::MIN_POSITIVE)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|p| p.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{FIELD_CSV_HEADER}")?;
        for (m, p) in self.lattice.modes().iter().zip(&self.coeffs) {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                m.k.kx, m.k.ky, m.k.kz, p[0].re, p[0].im, p[1].re, p[1].im
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != FIELD_CSV_HEADER {
            return Err(invalid_arg(format!("unexpected field CSV header `{header}`")));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || invalid_arg(format!("malformed field CSV row {}: `{line}`", lineno + 2));
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 7 {
                return Err(bad());
            }
            let ints: Vec<i32> = cols[..3].iter().map(|c| c.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            let fl: Vec<f64> = cols[3..].iter().map(|c| c.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            let k = WaveVector::new(ints[0], ints[1], ints[2])?;
            rows.push((k, [Complex64::new(fl[0], fl[1]), Complex64::new(fl[2], fl[3])]));
        }
        let max_k2 = rows.iter().map(|(k, _)| k.norm_sq()).max().ok_or_else(|| invalid_arg("empty field CSV"))?;
        let n = (max_k2 as f64).sqrt().floor() as usize;
        let lattice = Lattice::shared(n)?;
        if rows.len() != lattice.len() {
            return Err(invalid_arg(format!(
                "field CSV has {} rows, truncation n = {n} needs {}",
                rows.len(),
                lattice.len()
            )));
        }
        let mut f = SpectralField::zeros_on(lattice);
        for (k, p) in rows {
            match f.lattice.slot(k) {
                Some(Slot::Stored(i)) => f.coeffs[i] = p,
                _ => return Err(invalid_arg(format!("mode {k} is not a stored half-lattice mode"))),
            }
        }
        Ok(f)
    }
}
