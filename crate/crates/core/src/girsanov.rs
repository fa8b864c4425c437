//! Reweighting transport-only trajectories into full-system trajectories.
//!
//! The full and transport systems differ by the drift `B₂(η, Tη)`, which the
//! noise `σ dβ`, `σ = s (-Δ)^{-b}`, can absorb: writing
//! `B₂ = σ G` with `G = s⁻¹ (-Δ)^b B₂(η, Tη)` (the drift gap), the density of
//! the full law against the transport law on `[0, T]` is
//!
//! ```text
//! W = exp( Σ_steps Σ_{k∈Z³₊, j} Re(conj(G_{k,j}) Δβ_{k,j}) - ½ Σ_steps Σ_{k∈Z³₊, j} |G_{k,j}|² dt )
//! ```
//!
//! Sums run over stored modes: each complex `Δβ_{k,j}` carries two
//! independent real Brownian increments of variance `dt`, and the conjugate
//! modes are not independent coordinates.
//!
//! The exponential Euler scheme weights the drift by `φ₁(h) dt` and the noise
//! by `q σ`, so the discrete systems differ by the shift
//! `Ĝ = φ₁(h) / q · G`. Using `Ĝ` makes the weighted estimator exactly
//! unbiased for the discretised laws; `Ĝ → G` as `dt → 0`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    make_initial, observables, Observables, SimConfig, Stepper, SystemKind, TrajectoryState,
    OBSERVABLE_NAMES,
};
use crate::error::{invalid_arg, HvError, Result};
use crate::field::SpectralField;
use crate::lattice::Lattice;
use crate::noise::{fill_wiener_increment, mean_stderr, WienerIncrement};
use crate::nonlinear::PaddedProductPlan;
use crate::operators::{biot_savart, fractional_laplacian};
use crate::rng::{RngStream, StreamPurpose};

/// Sign of the stochastic-integral term in the log-weight, fixed by
/// [`sign_calibration`].
pub const GIRSANOV_SIGN: f64 = 1.0;

/// Version tag carried by every [`LawComparisonReport`].
pub const REPORT_SCHEMA: &str = "hypervort.law_comparison.v1";

/// `G = (-Δ)^b P[(η·∇) Tη]`.
pub fn drift_gap(eta: &SpectralField, b: f64, plan: &mut PaddedProductPlan) -> Result<SpectralField> {
    let v = biot_savart(eta);
    let (_, stretching) = plan.vorticity_terms(eta, &v)?;
    Ok(fractional_laplacian(b, &stretching))
}

/// Scheme-consistent shift `Ĝ_k = φ₁(h_k) dt / (q_k σ_k dt) · B₂_k` for a
/// stepper's coefficients, given the (already scaled) stretching term.
pub fn scheme_gap(stepper: &Stepper, stretching: &SpectralField) -> SpectralField {
    let w = stepper.drift_weight();
    let g = stepper.noise_gain();
    let dt = stepper.dt();
    let mut i = 0;
    stretching.map_modes(|_, p| {
        let f = w[i] / (g[i] * dt);
        i += 1;
        [p[0] * f, p[1] * f]
    })
}

/// Running exponent of the Radon–Nikodym weight along one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GirsanovAccumulator {
    pub dt: f64,
    /// `Σ Re(conj(G) Δβ)` over steps and stored modes.
    pub ito_term: f64,
    /// `Σ |G|² dt` over steps and stored modes.
    pub qv_term: f64,
    /// Full-lattice `‖G‖²_{L2}` at the left end of every step.
    pub g_sq_history: Vec<f64>,
}

impl GirsanovAccumulator {
    pub fn new(dt: f64) -> Self {
        Self { dt, ito_term: 0.0, qv_term: 0.0, g_sq_history: Vec::new() }
    }

    pub fn log_weight(&self) -> f64 {
        self.log_weight_with_sign(GIRSANOV_SIGN)
    }

    pub fn log_weight_with_sign(&self, sign: f64) -> f64 {
        sign * self.ito_term - 0.5 * self.qv_term
    }

    pub fn weight(&self) -> f64 {
        self.log_weight().exp()
    }

    /// `∫‖G‖²_{L2} dt` by left-endpoint sums.
    pub fn integrated_g_sq(&self) -> f64 {
        self.g_sq_history.iter().sum::<f64>() * self.dt
    }
}

/// Add one step: `g` at the left end of the step, `dw` the raw increment
/// that drove it.
pub fn accumulate(acc: &mut GirsanovAccumulator, g: &SpectralField, dw: &WienerIncrement, dt: f64) -> Result<()> {
    if (dt - acc.dt).abs() > 1e-12 * acc.dt || (dw.dt - acc.dt).abs() > 1e-12 * acc.dt {
        return Err(invalid_arg(format!(
            "accumulator dt = {} does not match step dt = {} / increment dt = {}",
            acc.dt, dt, dw.dt
        )));
    }
    if g.coeffs().len() != dw.beta.len() {
        return Err(HvError::TruncationMismatch { expected: dw.lattice.n(), got: g.n() });
    }
    let mut ito = 0.0;
    let mut sq = 0.0;
    for (p, db) in g.coeffs().iter().zip(&dw.beta) {
        for j in 0..2 {
            ito += (p[j].conj() * db[j]).re;
            sq += p[j].norm_sqr();
        }
    }
    acc.ito_term += ito;
    acc.qv_term += sq * dt;
    acc.g_sq_history.push(2.0 * sq);
    Ok(())
}

fn require_noise(cfg: &SimConfig) -> Result<()> {
    if cfg.noise_scale == 0.0 {
        return Err(invalid_arg("reweighting needs a nonzero noise amplitude"));
    }
    Ok(())
}

fn transport_config(cfg: &SimConfig) -> SimConfig {
    SimConfig { system: SystemKind::TransportOnly, ..cfg.clone() }
}

/// Output of one weighted transport-only path.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPath {
    pub terminal: SpectralField,
    pub acc: GirsanovAccumulator,
    /// Accumulator state at each requested check step, in request order.
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub ito_term: f64,
    pub qv_term: f64,
}

impl Checkpoint {
    pub fn weight(&self, sign: f64) -> f64 {
        (sign * self.ito_term - 0.5 * self.qv_term).exp()
    }
}

/// Simulate the transport system and accumulate the scheme-consistent
/// weight exponent. `initial` is the starting field and `check_steps` the
/// step indices at which the weight is recorded.
pub fn weighted_path(
    cfg: &SimConfig,
    initial: &SpectralField,
    stepper: &mut Stepper,
    path_id: u64,
    purpose: StreamPurpose,
    check_steps: &[usize],
) -> Result<WeightedPath> {
    require_noise(cfg)?;
    if stepper.system() != SystemKind::TransportOnly {
        return Err(invalid_arg("weighted paths run the transport-only system"));
    }
    let mut state = TrajectoryState::start(SystemKind::TransportOnly, initial.clone());
    let mut rng = RngStream::new(cfg.seed, path_id, purpose);
    let mut dw = WienerIncrement::zeros(cfg.dt, initial.lattice().clone());
    let mut acc = GirsanovAccumulator::new(cfg.dt);
    let mut at = vec![None; check_steps.len()];
    let mut mark = |step: usize, t: f64, acc: &GirsanovAccumulator| {
        for (slot, &s) in at.iter_mut().zip(check_steps) {
            if s == step {
                *slot = Some(Checkpoint { t, ito_term: acc.ito_term, qv_term: acc.qv_term });
            }
        }
    };
    mark(0, 0.0, &acc);
    let gap_scale = cfg.stretching_scale;
    for s in 1..=cfg.steps() {
        let terms = stepper.drift_terms(&state.field)?;
        let g = scheme_gap(stepper, &terms.stretching.scaled(gap_scale));
        let drift = stepper.assemble_drift(&terms);
        fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
        accumulate(&mut acc, &g, &dw, cfg.dt)?;
        stepper.advance(&mut state, &dw, Some(&drift))?;
        mark(s, state.t, &acc);
    }
    let checkpoints = at
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| invalid_arg("check step beyond the end of the run"))?;
    Ok(WeightedPath { terminal: state.field, acc, checkpoints })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitenessRow {
    pub n: usize,
    /// Sample mean of `∫₀ᵀ ‖G‖²_{L2} dt` with `G = (-Δ)^b B₂(η, Tη)`.
    pub mean: f64,
    pub stderr: f64,
    /// `|mean_n - mean_prev| / mean_prev`, absent for the first row.
    pub relative_change: Option<f64>,
}

/// Restrict a field to a smaller truncation, matching modes by wavevector.
pub fn restrict(f: &SpectralField, n: usize) -> Result<SpectralField> {
    if n > f.n() {
        return Err(invalid_arg(format!("cannot restrict n = {} to larger n = {n}", f.n())));
    }
    let lattice = Lattice::shared(n)?;
    Ok(SpectralField::from_fn(lattice, |m| f.get(m.k)))
}

fn restrict_increment(src: &WienerIncrement, dst: &mut WienerIncrement) {
    let big = &src.lattice;
    for (m, out) in dst.lattice.clone().modes().iter().zip(dst.beta.iter_mut()) {
        match big.slot(m.k) {
            Some(crate::lattice::Slot::Stored(i)) => *out = src.beta[i],
            _ => unreachable!("smaller lattice is a subset with the same half-lattice"),
        }
    }
    dst.dt = src.dt;
}

/// `E[∫₀ᵀ ‖G‖² dt]` along transport-only paths at each truncation.
///
/// All truncations share the initial field and the noise: both are drawn at
/// the largest `n` and restricted, so differences between rows are not
/// swamped by independent sampling noise.
pub fn finiteness_diagnostic(cfg: &SimConfig, n_list: &[usize], paths: usize) -> Result<Vec<FinitenessRow>> {
    if n_list.is_empty() {
        return Err(invalid_arg("finiteness diagnostic needs at least one truncation"));
    }
    if paths < 2 {
        return Err(invalid_arg("finiteness diagnostic needs at least two paths"));
    }
    let n_max = *n_list.iter().max().expect("nonempty");
    let big_initial = make_initial(&cfg.initial, n_max)?;
    let big_lattice = Lattice::shared(n_max)?;
    let mut rows: Vec<FinitenessRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ncfg = SimConfig { n, system: SystemKind::TransportOnly, ..cfg.clone() };
        let base = Stepper::new(&ncfg)?;
        let initial = restrict(&big_initial, n)?;
        let samples: Vec<f64> = (0..paths as u64)
            .into_par_iter()
            .map_init(
                || base.clone(),
                |stepper, p| -> Result<f64> {
                    let mut rng = RngStream::new(cfg.seed, p, StreamPurpose::Scan);
                    let mut big = WienerIncrement::zeros(cfg.dt, big_lattice.clone());
                    let mut dw = WienerIncrement::zeros(cfg.dt, initial.lattice().clone());
                    let mut state = TrajectoryState::start(SystemKind::TransportOnly, initial.clone());
                    let mut integral = 0.0;
                    for _ in 0..ncfg.steps() {
                        let terms = stepper.drift_terms(&state.field)?;
                        let g = fractional_laplacian(cfg.b, &terms.stretching);
                        integral += g.sobolev_sq(0.0) * cfg.dt;
                        let drift = stepper.assemble_drift(&terms);
                        fill_wiener_increment(&mut big, cfg.dt, &mut rng)?;
                        restrict_increment(&big, &mut dw);
                        stepper.advance(&mut state, &dw, Some(&drift))?;
                    }
                    Ok(integral)
                },
            )
            .collect::<Result<_>>()?;
        let (mean, stderr) = mean_stderr(&samples);
        let relative_change = rows.last().map(|r| (mean - r.mean).abs() / r.mean);
        rows.push(FinitenessRow { n, mean, stderr, relative_change });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableComparison {
    pub name: String,
    pub direct_mean: f64,
    pub direct_stderr: f64,
    pub weighted_mean: f64,
    pub weighted_stderr: f64,
    /// Plain transport-ensemble mean, for scale.
    pub unweighted_mean: f64,
    /// `(weighted - direct) / sqrt(se_d² + se_w²)`
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawComparisonReport {
    pub schema: String,
    pub config: SimConfig,
    pub paths: usize,
    pub sign: f64,
    pub observables: Vec<ObservableComparison>,
    pub mean_weight: f64,
    pub weight_stderr: f64,
    pub weight_pass: bool,
    /// `(ΣW)² / ΣW²`
    pub effective_sample_size: f64,
    /// Whether every weight equals 1 exactly.
    pub weights_identically_one: bool,
    pub blow_ups_direct: usize,
    pub blow_ups_weighted: usize,
    pub blow_up_pass: bool,
    pub passed: bool,
}

pub const REPORT_CSV_HEADER: &str = "quantity,direct_mean,direct_stderr,weighted_mean,weighted_stderr,z_score,pass";

impl LawComparisonReport {
    /// One row per observable, then a `mean_weight` row against the target 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{REPORT_CSV_HEADER}")?;
        for o in &self.observables {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{}",
                o.name, o.direct_mean, o.direct_stderr, o.weighted_mean, o.weighted_stderr, o.z_score, o.pass
            )?;
        }
        let z = (self.mean_weight - 1.0) / self.weight_stderr;
        writeln!(
            w,
            "mean_weight,{:e},{:e},{:e},{:e},{:e},{}",
            1.0, 0.0, self.mean_weight, self.weight_stderr, z, self.weight_pass
        )?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn within_3_sigma(diff: f64, se: f64) -> bool {
    diff == 0.0 || diff.abs() <= 3.0 * se
}

/// Direct full-system ensemble against the reweighted transport ensemble,
/// compared through the named observables at time `T`.
pub fn mc_compare_laws(cfg: &SimConfig, names: &[&str], paths: usize) -> Result<LawComparisonReport> {
    mc_compare_laws_with_sign(cfg, names, paths, GIRSANOV_SIGN)
}

pub fn mc_compare_laws_with_sign(cfg: &SimConfig, names: &[&str], paths: usize, sign: f64) -> Result<LawComparisonReport> {
    if paths == 0 {
        return Err(invalid_arg("law comparison needs at least one path"));
    }
    require_noise(cfg)?;
    for name in names {
        if !OBSERVABLE_NAMES.contains(name) {
            return Err(invalid_arg(format!("unknown observable `{name}`")));
        }
    }
    let initial = make_initial(&cfg.initial, cfg.n)?;
    let dcfg = SimConfig { system: SystemKind::FullVorticity, ..cfg.clone() };
    let wcfg = transport_config(cfg);
    let dstep = Stepper::new(&dcfg)?;
    let wstep = Stepper::new(&wcfg)?;

    let direct: Vec<Result<Observables>> = (0..paths as u64)
        .into_par_iter()
        .map_init(
            || dstep.clone(),
            |stepper, p| {
                let mut state = TrajectoryState::start(SystemKind::FullVorticity, initial.clone());
                let mut rng = RngStream::new(cfg.seed, p, StreamPurpose::DirectEnsemble);
                let mut dw = WienerIncrement::zeros(cfg.dt, initial.lattice().clone());
                for _ in 0..dcfg.steps() {
                    fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
                    stepper.step(&mut state, &dw)?;
                }
                observables(&state.field)
            },
        )
        .collect();
    let weighted: Vec<Result<(Observables, f64)>> = (0..paths as u64)
        .into_par_iter()
        .map_init(
            || wstep.clone(),
            |stepper, p| {
                let wp = weighted_path(&wcfg, &initial, stepper, p, StreamPurpose::WeightedEnsemble, &[])?;
                Ok((observables(&wp.terminal)?, wp.acc.log_weight_with_sign(sign).exp()))
            },
        )
        .collect();

    let mut blow_ups_direct = 0;
    let mut direct_obs = Vec::with_capacity(paths);
    for r in direct {
        match r {
            Ok(o) => direct_obs.push(o),
            Err(HvError::BlowUp { .. }) => blow_ups_direct += 1,
            Err(e) => return Err(e),
        }
    }
    let mut blow_ups_weighted = 0;
    let mut weighted_obs = Vec::with_capacity(paths);
    for r in weighted {
        match r {
            Ok(o) => weighted_obs.push(o),
            Err(HvError::BlowUp { .. }) => blow_ups_weighted += 1,
            Err(e) => return Err(e),
        }
    }
    let blow_up_pass = (blow_ups_direct.max(blow_ups_weighted) as f64) <= 0.01 * paths as f64;

    let weights: Vec<f64> = weighted_obs.iter().map(|(_, w)| *w).collect();
    let (mean_weight, weight_stderr) = mean_stderr(&weights);
    let sum_w: f64 = weights.iter().sum();
    let sum_w2: f64 = weights.iter().map(|w| w * w).sum();
    let effective_sample_size = if sum_w2 > 0.0 { sum_w * sum_w / sum_w2 } else { 0.0 };
    let weights_identically_one = !weights.is_empty() && weights.iter().all(|w| *w == 1.0);
    let weight_pass = within_3_sigma(mean_weight - 1.0, weight_stderr);

    let mut comparisons = Vec::with_capacity(names.len());
    for name in names {
        let d: Vec<f64> = direct_obs.iter().map(|o| o.get(name).expect("checked name")).collect();
        let w: Vec<f64> = weighted_obs.iter().map(|(o, w)| w * o.get(name).expect("checked name")).collect();
        let (dm, ds) = mean_stderr(&d);
        let (wm, ws) = mean_stderr(&w);
        let plain: Vec<f64> = weighted_obs.iter().map(|(o, _)| o.get(name).expect("checked name")).collect();
        let (um, _) = mean_stderr(&plain);
        let se = (ds * ds + ws * ws).sqrt();
        comparisons.push(ObservableComparison {
            name: name.to_string(),
            direct_mean: dm,
            direct_stderr: ds,
            weighted_mean: wm,
            weighted_stderr: ws,
            unweighted_mean: um,
            z_score: if se > 0.0 { (wm - dm) / se } else { 0.0 },
            pass: within_3_sigma(wm - dm, se),
        });
    }
    let passed = blow_up_pass && weight_pass && comparisons.iter().all(|c| c.pass);
    Ok(LawComparisonReport {
        schema: REPORT_SCHEMA.to_string(),
        config: cfg.clone(),
        paths,
        sign,
        observables: comparisons,
        mean_weight,
        weight_stderr,
        weight_pass,
        effective_sample_size,
        weights_identically_one,
        blow_ups_direct,
        blow_ups_weighted,
        blow_up_pass,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingalePoint {
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// `E[W(t)]` along the transport ensemble at the given times (which must
/// lie on the step grid).
pub fn martingale_check(cfg: &SimConfig, paths: usize, times: &[f64]) -> Result<Vec<MartingalePoint>> {
    martingale_check_with_sign(cfg, paths, times, GIRSANOV_SIGN)
}

pub fn martingale_check_with_sign(cfg: &SimConfig, paths: usize, times: &[f64], sign: f64) -> Result<Vec<MartingalePoint>> {
    if paths < 2 {
        return Err(invalid_arg("martingale check needs at least two paths"));
    }
    let mut steps = Vec::with_capacity(times.len());
    for &t in times {
        let s = (t / cfg.dt).round();
        if !(t >= 0.0) || t > cfg.t_end * (1.0 + 1e-12) || (s * cfg.dt - t).abs() > 1e-9 * cfg.dt.max(t) {
            return Err(invalid_arg(format!("check time {t} is not on the step grid of [0, T]")));
        }
        steps.push(s as usize);
    }
    // only the run up to the last check time is needed
    let last = steps.iter().copied().max().unwrap_or(0).max(1);
    let wcfg = SimConfig { t_end: last as f64 * cfg.dt, ..transport_config(cfg) };
    let initial = make_initial(&cfg.initial, cfg.n)?;
    let base = Stepper::new(&wcfg)?;
    let per_path: Vec<WeightedPath> = (0..paths as u64)
        .into_par_iter()
        .map_init(
            || base.clone(),
            |stepper, p| weighted_path(&wcfg, &initial, stepper, p, StreamPurpose::WeightedEnsemble, &steps),
        )
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(times.len());
    for (c, &t) in times.iter().enumerate() {
        let w: Vec<f64> = per_path.iter().map(|wp| wp.checkpoints[c].weight(sign)).collect();
        let (mean, stderr) = mean_stderr(&w);
        out.push(MartingalePoint { t, mean, stderr });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCalibrationRow {
    pub sign: f64,
    /// Sample mean of `W · Re⟨B₂, η₁ - E_full[ξ₁]⟩`.
    pub mean: f64,
    pub stderr: f64,
    pub z_score: f64,
}

/// One-step mean-shift experiment that tells the two signs apart.
///
/// From the configured initial field, one transport step reweighted with
/// sign `s` must reproduce the mean of one full step. Projected on the
/// stretching direction, `E[W(η₁ - E ξ₁)]` vanishes for the right sign and
/// equals `-2 φ₁ dt ⟨B₂, B₂⟩`-scale for the wrong one. Both signs give
/// `E[W] = 1`, so unit mean alone cannot pin the sign.
pub fn sign_calibration(cfg: &SimConfig, paths: usize) -> Result<Vec<SignCalibrationRow>> {
    require_noise(cfg)?;
    if paths < 2 {
        return Err(invalid_arg("sign calibration needs at least two paths"));
    }
    let one = SimConfig { t_end: cfg.dt, system: SystemKind::TransportOnly, ..cfg.clone() };
    let mut stepper = Stepper::new(&one)?;
    let xi0 = make_initial(&cfg.initial, cfg.n)?;
    let terms = stepper.drift_terms(&xi0)?;
    let b2 = terms.stretching.scaled(cfg.stretching_scale);
    let g = scheme_gap(&stepper, &b2);
    let transport_drift = stepper.assemble_drift(&terms);
    // deterministic mean of one full step
    let mut full_drift = transport_drift.clone();
    full_drift.axpy(1.0, &b2);
    let mut mean_full = TrajectoryState::start(SystemKind::TransportOnly, xi0.clone());
    let zero = WienerIncrement::zeros(cfg.dt, xi0.lattice().clone());
    stepper.advance(&mut mean_full, &zero, Some(&full_drift))?;

    let mut rows = Vec::new();
    for sign in [1.0, -1.0] {
        let samples: Vec<f64> = (0..paths as u64)
            .map(|p| -> Result<f64> {
                let mut rng = RngStream::new(cfg.seed, p, StreamPurpose::Custom(0x5167));
                let mut dw = WienerIncrement::zeros(cfg.dt, xi0.lattice().clone());
                fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
                let mut acc = GirsanovAccumulator::new(cfg.dt);
                accumulate(&mut acc, &g, &dw, cfg.dt)?;
                let mut state = TrajectoryState::start(SystemKind::TransportOnly, xi0.clone());
                stepper.advance(&mut state, &dw, Some(&transport_drift))?;
                Ok(acc.log_weight_with_sign(sign).exp() * state.field.sub(&mean_full.field).inner(&b2))
            })
            .collect::<Result<_>>()?;
        let (mean, stderr) = mean_stderr(&samples);
        rows.push(SignCalibrationRow { sign, mean, stderr, z_score: mean / stderr });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InitialSpec;
    use crate::lattice::WaveVector;
    use crate::nonlinear::{exact_convolution, ProductForm};
    use num_complex::Complex64;

    fn small(system: SystemKind) -> SimConfig {
        SimConfig { n: 2, t_end: 0.01, dt: 1e-3, system, ..SimConfig::default() }
    }

    #[test]
    fn drift_gap_examples() {
        let mut plan = PaddedProductPlan::new(3).unwrap();
        let z = SpectralField::zeros(3).unwrap();
        assert_eq!(drift_gap(&z, 1.0, &mut plan).unwrap().max_abs_coeff(), 0.0);
        let k = WaveVector::new(1, 1, 0).unwrap();
        let single = SpectralField::single_mode(3, k, [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)]).unwrap();
        let random = make_initial(&InitialSpec::SmoothRandom { seed: 2, decay: 7.0, amplitude: 1.0 }, 3).unwrap();
        for eta in [single, random] {
            let g = drift_gap(&eta, 1.0, &mut plan).unwrap();
            let oracle = fractional_laplacian(1.0, &exact_convolution(&eta, &biot_savart(&eta), ProductForm::Stretching).unwrap());
            let scale = oracle.l2_norm().max(eta.l2_norm().powi(2));
            assert!(g.sub(&oracle).l2_norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn drift_gap_bounded_by_h2_square() {
        let mut plan = PaddedProductPlan::new(3).unwrap();
        let mut ratio = |seed: u64| {
            let eta = make_initial(&InitialSpec::SmoothRandom { seed, decay: 7.0, amplitude: 1.0 }, 3).unwrap();
            let eta = eta.scaled(1.0 / eta.sobolev_sq(2.0).sqrt());
            drift_gap(&eta, 1.0, &mut plan).unwrap().l2_norm()
        };
        // measure the constant on one batch, check it on a fresh one
        let c = (0..20).map(&mut ratio).fold(0.0, f64::max);
        let fresh = (20..60).map(&mut ratio).fold(0.0, f64::max);
        assert!(c > 0.0 && fresh <= 1.2 * c, "{fresh} vs {c}");
        // quadratic: doubling the field quadruples the ratio numerator
        let eta = make_initial(&InitialSpec::default(), 3).unwrap();
        let g1 = drift_gap(&eta, 1.0, &mut plan).unwrap().l2_norm();
        let g2 = drift_gap(&eta.scaled(2.0), 1.0, &mut plan).unwrap().l2_norm();
        assert!((g2 - 4.0 * g1).abs() <= 1e-12 * g2);
    }

    #[test]
    fn accumulator_arithmetic() {
        let lattice = Lattice::shared(1).unwrap();
        let mut acc = GirsanovAccumulator::new(0.1);
        let zero = SpectralField::zeros_on(lattice.clone());
        let mut dw = WienerIncrement::zeros(0.1, lattice.clone());
        dw.beta[0] = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.0)];
        dw.beta[2] = [Complex64::new(0.0, 3.0), Complex64::new(1.0, 1.0)];
        accumulate(&mut acc, &zero, &dw, 0.1).unwrap();
        assert_eq!(acc.weight(), 1.0);
        let g = SpectralField::from_fn(lattice.clone(), |_| [Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]);
        accumulate(&mut acc, &g, &dw, 0.1).unwrap();
        // Re(conj(1+2i)(0.5-i)) + Re(conj(-i)·2) + Re(conj(1+2i)(3i)) + Re(conj(-i)(1+i))
        let hand = (0.5 - 2.0) + 0.0 + 6.0 + (-1.0);
        assert!((acc.ito_term - hand).abs() < 1e-14);
        // three modes × (|1+2i|² + |-i|²) × dt
        assert!((acc.qv_term - 3.0 * 6.0 * 0.1).abs() < 1e-14);
        assert!((acc.integrated_g_sq() - 0.1 * (0.0 + g.sobolev_sq(0.0))).abs() < 1e-14);
        assert!((acc.log_weight() - (hand - 0.9)).abs() < 1e-14);
        assert!(accumulate(&mut acc, &g, &dw, 0.2).is_err());
    }

    #[test]
    fn qv_matches_independent_quadrature() {
        let cfg = small(SystemKind::TransportOnly);
        let initial = make_initial(&cfg.initial, cfg.n).unwrap();
        let mut stepper = Stepper::new(&cfg).unwrap();
        let wp = weighted_path(&cfg, &initial, &mut stepper, 0, StreamPurpose::WeightedEnsemble, &[]).unwrap();
        // replay the transport path (same stream) and integrate ‖Ĝ‖² by hand
        let mut replay = Stepper::new(&cfg).unwrap();
        let mut state = TrajectoryState::start(SystemKind::TransportOnly, initial.clone());
        let mut rng = RngStream::new(cfg.seed, 0, StreamPurpose::WeightedEnsemble);
        let mut dw = WienerIncrement::zeros(cfg.dt, initial.lattice().clone());
        let mut q = 0.0;
        for _ in 0..cfg.steps() {
            let terms = replay.drift_terms(&state.field).unwrap();
            q += 0.5 * scheme_gap(&replay, &terms.stretching).sobolev_sq(0.0) * cfg.dt;
            fill_wiener_increment(&mut dw, cfg.dt, &mut rng).unwrap();
            replay.step(&mut state, &dw).unwrap();
        }
        assert!((wp.acc.qv_term - q).abs() <= 1e-12 * q);
        assert_eq!(state.field, wp.terminal);
        assert_eq!(wp.acc.g_sq_history.len(), cfg.steps());
    }

    #[test]
    fn degenerate_configuration_has_unit_weights() {
        let cfg = SimConfig { stretching_scale: 0.0, ..small(SystemKind::FullVorticity) };
        let r = mc_compare_laws(&cfg, &["enstrophy", "energy"], 50).unwrap();
        assert!(r.weights_identically_one);
        assert_eq!(r.mean_weight, 1.0);
        assert_eq!(r.effective_sample_size, 50.0);
        assert!(r.passed);
    }

    #[test]
    fn argument_checks() {
        let cfg = small(SystemKind::FullVorticity);
        assert!(mc_compare_laws(&cfg, &["enstrophy"], 0).is_err());
        assert!(mc_compare_laws(&cfg, &["vorticity"], 10).is_err());
        assert!(mc_compare_laws(&SimConfig { noise_scale: 0.0, ..cfg.clone() }, &["energy"], 10).is_err());
        assert!(martingale_check(&cfg, 10, &[0.0105]).is_err());
        assert!(martingale_check(&cfg, 10, &[0.5]).is_err());
        assert!(finiteness_diagnostic(&cfg, &[], 10).is_err());
    }

    #[test]
    fn weight_starts_at_one() {
        let cfg = small(SystemKind::TransportOnly);
        let pts = martingale_check(&cfg, 20, &[0.0, 0.005, 0.01]).unwrap();
        assert_eq!(pts[0].mean, 1.0);
        assert_eq!(pts[0].stderr, 0.0);
        assert!(pts.iter().all(|p| p.mean > 0.0));
    }

    #[test]
    fn finiteness_zero_data_zero_noise() {
        let cfg = SimConfig { initial: InitialSpec::Zero, noise_scale: 0.0, ..small(SystemKind::TransportOnly) };
        let rows = finiteness_diagnostic(&cfg, &[1, 2], 3).unwrap();
        assert!(rows.iter().all(|r| r.mean == 0.0));
    }

    #[test]
    fn sign_is_pinned_by_mean_shift() {
        let cfg = SimConfig { t_end: 1e-3, ..SimConfig::default() };
        let rows = sign_calibration(&cfg, 80_000).unwrap();
        let z = |s: f64| rows.iter().find(|r| r.sign == s).unwrap().z_score;
        assert!(z(GIRSANOV_SIGN).abs() < 3.0, "{rows:?}");
        assert!(z(-GIRSANOV_SIGN).abs() > 5.0, "{rows:?}");
    }

    #[test]
    fn restriction_keeps_shared_modes() {
        let f = make_initial(&InitialSpec::default(), 4).unwrap();
        let r = restrict(&f, 2).unwrap();
        for m in r.modes() {
            assert_eq!(r.get(m.k), f.get(m.k));
        }
        assert!(restrict(&r, 3).is_err());
    }

    #[test]
    fn report_serialisation() {
        let cfg = SimConfig { stretching_scale: 0.0, ..small(SystemKind::FullVorticity) };
        let r = mc_compare_laws(&cfg, &["energy"], 5).unwrap();
        let back: LawComparisonReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("mean_weight,"));
    }
}
