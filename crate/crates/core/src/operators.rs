//! Linear spectral operators: fractional Laplacian powers, the hyperviscous
//! semigroup, curl, Biot–Savart and Galerkin truncation.
//!
//! All act mode by mode on the half-lattice; conjugate modes follow from the
//! reality condition. Curl and Biot–Savart are applied on the right-handed
//! half-lattice frames, `k × b1 = |k| b2`, `k × b2 = -|k| b1`.

use num_complex::Complex64;

use crate::error::{invalid_arg, Result};
use crate::field::SpectralField;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(-Δ)^a`: multiply mode `k` by `|k|^{2a}`.
pub fn fractional_laplacian(a: f64, f: &SpectralField) -> SpectralField {
    if a == 0.0 {
        return f.clone();
    }
    f.map_modes(|m, p| {
        let s = m.k2.powf(a);
        [p[0] * s, p[1] * s]
    })
}

/// `e^{-t(-Δ)^s}`: multiply mode `k` by `exp(-t |k|^{2s})`.
pub fn semigroup_apply(t: f64, s: f64, f: &SpectralField) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(invalid_arg(format!("semigroup time must be >= 0, got {t}")));
    }
    Ok(f.map_modes(|m, p| {
        let d = (-t * m.k2.powf(s)).exp();
        [p[0] * d, p[1] * d]
    }))
}

/// `∇ ×`: `i k × (u1 b1 + u2 b2) = i|k| (u1 b2 - u2 b1)`.
pub fn curl(v: &SpectralField) -> SpectralField {
    v.map_modes(|m, p| {
        let s = I * m.kabs;
        [-s * p[1], s * p[0]]
    })
}

/// Velocity from vorticity: `v = (i/|k|)(ξ1 b2 - ξ2 b1)`, the divergence-free
/// solution of `-Δv = ∇ × ξ`.
pub fn biot_savart(xi: &SpectralField) -> SpectralField {
    xi.map_modes(|m, p| {
        let s = I / m.kabs;
        [-s * p[1], s * p[0]]
    })
}

/// `Π_m`: zero every mode with `|k| > m`.
pub fn galerkin_project(m: usize, f: &SpectralField) -> Result<SpectralField> {
    if m == 0 {
        return Err(invalid_arg("Galerkin projection needs m >= 1"));
    }
    let r2 = (m * m) as f64;
    Ok(f.map_modes(|mode, p| if mode.k2 <= r2 { p } else { [Complex64::new(0.0, 0.0); 2] }))
}
