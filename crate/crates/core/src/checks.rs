//! Quick invariant suite behind `hypervort check`.
//!
//! Each item is a reduced-size version of a test in the test suite, sized to
//! finish in seconds on one core.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{deterministic_energy_balance, integrate_path, InitialSpec, SimConfig, SystemKind};
use crate::error::Result;
use crate::field::SpectralField;
use crate::girsanov::mc_compare_laws;
use crate::lattice::{cross, dot, frame_vectors, Lattice, WaveVector};
use crate::noise::{mean_stderr, ou_exact_step, NoiseSpec};
use crate::nonlinear::{exact_convolution, PaddedProductPlan, ProductForm};
use crate::operators::{biot_savart, curl};
use crate::rng::{RngStream, StreamPurpose};
use crate::transform::{leray_project, norm_lp, to_physical, to_spectral, VectorSpectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Measured quantity compared against the bound.
    pub value: f64,
    pub bound: f64,
}

fn item(name: &str, value: f64, bound: f64) -> CheckResult {
    CheckResult { name: name.to_string(), pass: value.is_finite() && value <= bound, value, bound }
}

fn random_field(n: usize, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SpectralField::random(Lattice::shared(n)?, &mut rng, |k| k.powf(-1.5)))
}

/// Largest violation of the frame invariants over `0 < |k|_∞ ≤ r`.
pub fn frame_violation(r: i32) -> f64 {
    let mut worst = 0.0f64;
    for kx in -r..=r {
        for ky in -r..=r {
            for kz in -r..=r {
                let Ok(k) = WaveVector::new(kx, ky, kz) else { continue };
                let f = frame_vectors(k).expect("nonzero");
                let kv = k.as_f64();
                let kn = k.norm();
                let mut errs = vec![
                    (dot(&f.b1, &f.b1) - 1.0).abs(),
                    (dot(&f.b2, &f.b2) - 1.0).abs(),
                    dot(&f.b1, &f.b2).abs(),
                    dot(&f.b1, &kv).abs() / kn,
                    dot(&f.b2, &kv).abs() / kn,
                ];
                if k.in_half_lattice() {
                    let c = cross(&f.b1, &f.b2);
                    errs.extend((0..3).map(|d| (c[d] - kv[d] / kn).abs()));
                } else {
                    let g = frame_vectors(k.neg()).expect("nonzero");
                    errs.extend((0..3).map(|d| (f.b1[d] + g.b1[d]).abs() + (f.b2[d] + g.b2[d]).abs()));
                }
                worst = errs.into_iter().fold(worst, f64::max);
            }
        }
    }
    worst
}

pub fn run_property_suite() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.push(item("frame invariants, |k| <= 16", frame_violation(16), 1e-14));

    let f = random_field(4, 1)?;
    let back = to_spectral(&to_physical(&f, 12)?, 4)?;
    out.push(item("spectral/physical round trip, n = 4, M = 12", back.max_abs_diff(&f), 1e-12));
    let l2 = norm_lp(&f, 2.0, 12)?;
    out.push(item("Parseval, n = 4", (l2 - f.l2_norm()).abs() / f.l2_norm(), 1e-10));

    let lattice = Lattice::shared(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vecs = (0..lattice.len())
        .map(|_| {
            std::array::from_fn(|_| {
                use rand::Rng;
                num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        })
        .collect();
    let raw = VectorSpectrum { lattice, vecs };
    let p1 = leray_project(&raw);
    let p2 = leray_project(&VectorSpectrum::from_field(&p1));
    out.push(item("Leray projection idempotent", p1.max_abs_diff(&p2), 1e-14));

    let xi = random_field(8, 3)?;
    let rt = curl(&biot_savart(&xi)).rel_l2_diff(&xi).max(biot_savart(&curl(&xi)).rel_l2_diff(&xi));
    out.push(item("curl and Biot-Savart inverse, n = 8", rt, 1e-12));

    let mut plan = PaddedProductPlan::new(4)?;
    let mut worst = 0.0f64;
    for s in 0..10 {
        let u = random_field(4, 100 + 3 * s)?;
        let v = random_field(4, 101 + 3 * s)?;
        let w = random_field(4, 102 + 3 * s)?;
        let scale = u.sobolev_sq(1.0).sqrt() * v.l2_norm() * w.l2_norm();
        let cancel = plan.advect(&u, &v)?.inner(&v).abs() / scale;
        let anti = (plan.advect(&u, &v)?.inner(&w) + plan.advect(&u, &w)?.inner(&v)).abs() / scale;
        worst = worst.max(cancel).max(anti);
    }
    out.push(item("trilinear cancellation and antisymmetry, n = 4", worst, 1e-10));

    let mut plan3 = PaddedProductPlan::new(3)?;
    let xi = random_field(3, 4)?;
    let v = biot_savart(&xi);
    let (t, s) = plan3.vorticity_terms(&xi, &v)?;
    let to = exact_convolution(&xi, &v, ProductForm::Transport)?;
    let so = exact_convolution(&xi, &v, ProductForm::Stretching)?;
    out.push(item("FFT products match convolution oracle, n = 3", t.rel_l2_diff(&to).max(s.rel_l2_diff(&so)), 1e-10));

    // one-mode OU variance after a long exact step, in standard errors
    let spec = NoiseSpec::new(1.0, 1.0, 1)?;
    let k = WaveVector::new(1, 0, 0)?;
    let mut rng = RngStream::new(0, 0, StreamPurpose::Custom(1));
    let samples: Vec<f64> = (0..4000)
        .map(|_| ou_exact_step(0.0.into(), k, &spec, 0.3, &mut rng).map(|z| z.norm_sqr()))
        .collect::<Result<_>>()?;
    let (mean, se) = mean_stderr(&samples);
    out.push(item("OU transition variance (standard errors)", (mean - spec.mode_variance(1.0, 0.3)).abs() / se, 4.0));

    let cfg = SimConfig {
        n: 3,
        dt: 1e-4,
        t_end: 0.01,
        noise_scale: 0.0,
        system: SystemKind::TransportOnly,
        initial: InitialSpec::SingleMode { k: [0, 0, 1], amplitude: 1.0 },
        ..SimConfig::default()
    };
    let e = deterministic_energy_balance(&cfg)?;
    out.push(item("transport energy balance (relative residual)", e.final_residual().abs() / e.initial_sq, 1e-3));

    let cfg = SimConfig { n: 2, t_end: 0.005, ..SimConfig::default() };
    let same = integrate_path(&cfg, 3)? == integrate_path(&cfg, 3)?;
    out.push(item("path determinism", if same { 0.0 } else { 1.0 }, 0.0));

    let cfg = SimConfig { n: 2, t_end: 0.005, stretching_scale: 0.0, ..SimConfig::default() };
    let r = mc_compare_laws(&cfg, &["enstrophy"], 20)?;
    out.push(item("stretching-off weights identically one", if r.weights_identically_one { 0.0 } else { 1.0 }, 0.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let results = run_property_suite().unwrap();
        for r in &results {
            assert!(r.pass, "{r:?}");
        }
        assert!(results.len() >= 10);
    }
}
