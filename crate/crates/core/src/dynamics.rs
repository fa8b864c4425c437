//! Time integration of the full vorticity system, the transport-only system,
//! the linear OU system and the two difference formulations.
//!
//! Every system is written as `du = (-A u + N(u)) dt + σ dβ` with
//! `A = (-Δ)^{1+c}`, `σ = s (-Δ)^{-b}` and stepped by exponential Euler:
//!
//! ```text
//! u' = e^{-h} u + φ₁(h) dt N(u) + q σ Δβ,   h = λ_k dt,  φ₁(h) = (1 - e^{-h}) / h
//! ```
//!
//! with `q = e^{-h}` (noise at the Itô point) or the exact OU factor.
//! Difference forms carry the OU companion `ζ` alongside and step it with
//! the same increments, so `β + ζ` reproduces the direct route to roundoff.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, HvError, Result};
use crate::field::SpectralField;
use crate::lattice::{Lattice, WaveVector};
use crate::noise::{fill_wiener_increment, NoiseSpec, WienerIncrement};
use crate::nonlinear::PaddedProductPlan;
use crate::operators::biot_savart;
use crate::rng::{RngStream, StreamPurpose};
use crate::transform::{fft_friendly, min_grid_dealiased, norm_lp};

/// `‖ξ‖_{L2}` above which a run is declared blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `dξ + [Aξ + B₁(Tξ, ξ) - B₂(ξ, Tξ)] dt = σ dβ`
    FullVorticity,
    /// `dη + [Aη + B₁(Tη, η)] dt = σ dβ`
    TransportOnly,
    /// `dζ + Aζ dt = σ dβ`
    LinearOu,
    /// Transport system for `β = η - ζ`, pathwise given `ζ`.
    DifferenceBeta,
    /// Full system for `δ = ξ - ζ`, pathwise given `ζ`.
    DifferenceDelta,
}

impl SystemKind {
    pub fn has_transport(self) -> bool {
        !matches!(self, SystemKind::LinearOu)
    }

    pub fn has_stretching(self) -> bool {
        matches!(self, SystemKind::FullVorticity | SystemKind::DifferenceDelta)
    }

    /// Whether the state is a difference variable with an OU companion.
    pub fn is_difference(self) -> bool {
        matches!(self, SystemKind::DifferenceBeta | SystemKind::DifferenceDelta)
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::FullVorticity => "full_vorticity",
            SystemKind::TransportOnly => "transport_only",
            SystemKind::LinearOu => "linear_ou",
            SystemKind::DifferenceBeta => "difference_beta",
            SystemKind::DifferenceDelta => "difference_delta",
        }
    }
}

/// Factor multiplying `σ Δβ` in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTreatment {
    /// `e^{-λ dt}`: the increment enters at the left end of the step.
    #[default]
    ItoPoint,
    /// `sqrt((1 - e^{-2λdt}) / (2λdt))`: exact OU transition law.
    ExactOu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Zero,
    /// `u1 = amplitude`, `u2 = 0` on the half-lattice representative of `k`.
    SingleMode { k: [i32; 3], amplitude: f64 },
    /// Independent Gaussian coefficients of size `amplitude · |k|^{-decay/2}`.
    SmoothRandom { seed: u64, decay: f64, amplitude: f64 },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::SmoothRandom { seed: 0, decay: 7.0, amplitude: 1.0 }
    }
}

pub fn make_initial(spec: &InitialSpec, n: usize) -> Result<SpectralField> {
    let lattice = Lattice::shared(n)?;
    match *spec {
        InitialSpec::Zero => Ok(SpectralField::zeros_on(lattice)),
        InitialSpec::SingleMode { k, amplitude } => {
            if !amplitude.is_finite() {
                return Err(HvError::InvalidConfig(format!("single-mode amplitude must be finite, got {amplitude}")));
            }
            let k = WaveVector::new(k[0], k[1], k[2]).map_err(|e| HvError::InvalidConfig(e.to_string()))?;
            let k = if k.in_half_lattice() { k } else { k.neg() };
            SpectralField::single_mode(n, k, [amplitude.into(), 0.0.into()])
                .map_err(|e| HvError::InvalidConfig(e.to_string()))
        }
        InitialSpec::SmoothRandom { seed, decay, amplitude } => {
            if !(decay > 4.5) {
                return Err(HvError::InvalidConfig(format!("smooth_random decay must exceed 4.5, got {decay}")));
            }
            if !amplitude.is_finite() {
                return Err(HvError::InvalidConfig(format!("smooth_random amplitude must be finite, got {amplitude}")));
            }
            let mut rng = RngStream::new(seed, 0, StreamPurpose::InitialData);
            Ok(SpectralField::random(lattice, &mut rng, |kabs| amplitude * kabs.powf(-0.5 * decay)))
        }
    }
}

/// Physical and numerical parameters of one experiment (`ν = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub c: f64,
    pub b: f64,
    /// Horizon `T`.
    pub t_end: f64,
    pub dt: f64,
    /// Record observables every this many steps (and at `T`).
    pub save_every: usize,
    pub paths: usize,
    pub seed: u64,
    pub system: SystemKind,
    pub initial: InitialSpec,
    /// Multiplier on the noise amplitude; 0 switches the noise off.
    pub noise_scale: f64,
    /// Multiplier on the stretching term; 0 turns the full system into the
    /// transport system.
    pub stretching_scale: f64,
    pub noise_treatment: NoiseTreatment,
    /// Keep full-field snapshots at save times.
    pub snapshots: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 3,
            c: 1.0,
            b: 1.0,
            t_end: 0.1,
            dt: 1e-3,
            save_every: 10,
            paths: 2000,
            seed: 0,
            system: SystemKind::FullVorticity,
            initial: InitialSpec::default(),
            noise_scale: 1.0,
            stretching_scale: 1.0,
            noise_treatment: NoiseTreatment::ItoPoint,
            snapshots: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HvError::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return bad(format!("T must be >= dt, got T = {} and dt = {}", self.t_end, self.dt));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return bad(format!("c must be >= 0, got {}", self.c));
        }
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return bad(format!("b must be >= 0, got {}", self.b));
        }
        if self.save_every == 0 {
            return bad("save_every must be >= 1".into());
        }
        if !self.noise_scale.is_finite() || !self.stretching_scale.is_finite() {
            return bad("noise_scale and stretching_scale must be finite".into());
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return bad(format!("T = {} is not a whole number of steps dt = {}", self.t_end, self.dt));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        Ok(NoiseSpec::new(self.b, self.c, self.n)?.with_scale(self.noise_scale))
    }
}

/// State of one trajectory: the evolved variable and, for difference forms,
/// the OU companion `ζ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub step: usize,
    pub field: SpectralField,
    pub companion: Option<SpectralField>,
}

impl TrajectoryState {
    /// Start at `t = 0`; difference forms start with `ζ(0) = 0`, so the
    /// difference variable equals the initial vorticity.
    pub fn start(system: SystemKind, initial: SpectralField) -> Self {
        let companion = system.is_difference().then(|| SpectralField::zeros_on(initial.lattice().clone()));
        Self { t: 0.0, step: 0, field: initial, companion }
    }

    /// `ξ`, `η` or `ζ`: the difference variable plus its companion.
    pub fn physical(&self) -> SpectralField {
        match &self.companion {
            Some(z) => self.field.add(z),
            None => self.field.clone(),
        }
    }
}

/// `φ₁(h) = (1 - e^{-h}) / h`
pub fn phi1(h: f64) -> f64 {
    if h.abs() < 1e-8 {
        1.0 - 0.5 * h
    } else {
        -(-h).exp_m1() / h
    }
}

/// `B₁(Tu, u)` and `B₂(u, Tu)` at one state.
#[derive(Debug, Clone)]
pub struct DriftTerms {
    pub transport: SpectralField,
    pub stretching: SpectralField,
}

/// Per-mode step coefficients plus the product plan for one configuration.
///
/// Owns scratch buffers: one per worker thread.
#[derive(Debug, Clone)]
pub struct Stepper {
    system: SystemKind,
    dt: f64,
    stretching_scale: f64,
    decay: Vec<f64>,
    phi_dt: Vec<f64>,
    gain: Vec<f64>,
    plan: PaddedProductPlan,
}

impl Stepper {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Self::with_plan(cfg, PaddedProductPlan::new(cfg.n)?)
    }

    pub fn with_plan(cfg: &SimConfig, plan: PaddedProductPlan) -> Result<Self> {
        if plan.n() != cfg.n {
            return Err(HvError::TruncationMismatch { expected: cfg.n, got: plan.n() });
        }
        let spec = cfg.noise_spec()?;
        let lattice = Lattice::shared(cfg.n)?;
        let dt = cfg.dt;
        let mut decay = Vec::with_capacity(lattice.len());
        let mut phi_dt = Vec::with_capacity(lattice.len());
        let mut gain = Vec::with_capacity(lattice.len());
        for m in lattice.modes() {
            let h = spec.rate(m.k2) * dt;
            let e = (-h).exp();
            decay.push(e);
            phi_dt.push(phi1(h) * dt);
            gain.push(match cfg.noise_treatment {
                NoiseTreatment::ItoPoint => e * spec.amplitude(m.k2),
                NoiseTreatment::ExactOu => spec.exact_gain(m.k2, dt),
            });
        }
        Ok(Self { system: cfg.system, dt, stretching_scale: cfg.stretching_scale, decay, phi_dt, gain, plan })
    }

    pub fn system(&self) -> SystemKind {
        self.system
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Multiplier `q_k σ_k` applied to `Δβ_k`.
    pub fn noise_gain(&self) -> &[f64] {
        &self.gain
    }

    /// `φ₁(λ_k dt) dt`
    pub fn drift_weight(&self) -> &[f64] {
        &self.phi_dt
    }

    pub fn plan_mut(&mut self) -> &mut PaddedProductPlan {
        &mut self.plan
    }

    /// Both quadratic terms at `u` (vorticity-like).
    pub fn drift_terms(&mut self, u: &SpectralField) -> Result<DriftTerms> {
        let v = biot_savart(u);
        let (transport, stretching) = self.plan.vorticity_terms(u, &v)?;
        Ok(DriftTerms { transport, stretching })
    }

    /// Nonlinear drift `N(u)` of this system assembled from its terms.
    pub fn assemble_drift(&self, terms: &DriftTerms) -> SpectralField {
        let mut d = terms.transport.scaled(-1.0);
        if self.system.has_stretching() {
            d.axpy(self.stretching_scale, &terms.stretching);
        }
        d
    }

    /// Nonlinear drift evaluated at the physical variable of `state`, or
    /// `None` for the linear system.
    pub fn drift(&mut self, state: &TrajectoryState) -> Result<Option<SpectralField>> {
        if !self.system.has_transport() {
            return Ok(None);
        }
        let u = state.physical();
        let terms = self.drift_terms(&u)?;
        Ok(Some(self.assemble_drift(&terms)))
    }

    /// One exponential Euler step driven by the raw increments `dw`.
    pub fn step(&mut self, state: &mut TrajectoryState, dw: &WienerIncrement) -> Result<()> {
        let drift = self.drift(state)?;
        self.advance(state, dw, drift.as_ref())
    }

    /// Apply the linear decay, the precomputed drift and the noise.
    pub fn advance(&self, state: &mut TrajectoryState, dw: &WienerIncrement, drift: Option<&SpectralField>) -> Result<()> {
        if (dw.dt - self.dt).abs() > 1e-12 * self.dt {
            return Err(invalid_arg(format!("increment dt = {} does not match step dt = {}", dw.dt, self.dt)));
        }
        if dw.beta.len() != self.decay.len() {
            return Err(HvError::TruncationMismatch { expected: state.field.n(), got: dw.lattice.n() });
        }
        let diff = state.companion.is_some();
        {
            let u = state.field.coeffs_mut();
            for i in 0..u.len() {
                let e = self.decay[i];
                for j in 0..2 {
                    let mut x = u[i][j] * e;
                    if let Some(d) = drift {
                        x += d.coeffs()[i][j] * self.phi_dt[i];
                    }
                    if !diff {
                        x += dw.beta[i][j] * self.gain[i];
                    }
                    u[i][j] = x;
                }
            }
        }
        if let Some(z) = state.companion.as_mut() {
            for ((p, db), (&e, &g)) in z.coeffs_mut().iter_mut().zip(&dw.beta).zip(self.decay.iter().zip(&self.gain)) {
                for j in 0..2 {
                    p[j] = p[j] * e + db[j] * g;
                }
            }
        }
        state.step += 1;
        state.t = state.step as f64 * self.dt;
        let norm = match &state.companion {
            Some(z) => state.field.add(z).l2_norm(),
            None => state.field.l2_norm(),
        };
        if !norm.is_finite() || norm > BLOW_UP_THRESHOLD {
            return Err(HvError::BlowUp { time: state.t, norm, history: Vec::new() });
        }
        Ok(())
    }
}

/// Plain Euler–Maruyama step `u' = u + dt(-Au + N(u)) + σ Δβ` for the
/// non-difference systems; a cross-check oracle for [`Stepper`].
pub fn euler_maruyama_step(
    state: &TrajectoryState,
    dw: &WienerIncrement,
    cfg: &SimConfig,
    plan: &mut PaddedProductPlan,
) -> Result<TrajectoryState> {
    if cfg.system.is_difference() {
        return Err(HvError::Unsupported("the Euler-Maruyama oracle evolves the direct systems only".into()));
    }
    if (dw.dt - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(invalid_arg(format!("increment dt = {} does not match step dt = {}", dw.dt, cfg.dt)));
    }
    let spec = cfg.noise_spec()?;
    let u = &state.field;
    let drift = if cfg.system.has_transport() {
        let v = biot_savart(u);
        let (b1, b2) = plan.vorticity_terms(u, &v)?;
        let mut d = b1.scaled(-1.0);
        if cfg.system.has_stretching() {
            d.axpy(cfg.stretching_scale, &b2);
        }
        Some(d)
    } else {
        None
    };
    let dt = cfg.dt;
    let mut i = 0;
    let next = u.map_modes(|m, p| {
        let lam = spec.rate(m.k2);
        let s = spec.amplitude(m.k2);
        let mut out = [p[0] - p[0] * (lam * dt), p[1] - p[1] * (lam * dt)];
        for j in 0..2 {
            if let Some(d) = &drift {
                out[j] += d.coeffs()[i][j] * dt;
            }
            out[j] += dw.beta[i][j] * s;
        }
        i += 1;
        out
    });
    Ok(TrajectoryState { t: state.t + dt, step: state.step + 1, field: next, companion: None })
}

/// Names of the recorded observables, in column order.
pub const OBSERVABLE_NAMES: [&str; 5] = ["energy", "enstrophy", "h1", "h2", "l3"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Observables {
    /// `½‖Tξ‖²_{L2} = ½‖ξ‖²_{H^{-1}}`
    pub energy: f64,
    /// `½‖ξ‖²_{L2}`
    pub enstrophy: f64,
    pub h1: f64,
    pub h2: f64,
    /// Grid quadrature on the dealiasing grid; approximate.
    pub l3: f64,
}

impl Observables {
    pub fn values(&self) -> [f64; 5] {
        [self.energy, self.enstrophy, self.h1, self.h2, self.l3]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        OBSERVABLE_NAMES.iter().position(|n| *n == name).map(|i| self.values()[i])
    }
}

/// Observables of a vorticity field.
pub fn observables(xi: &SpectralField) -> Result<Observables> {
    let m = fft_friendly(min_grid_dealiased(xi.n()));
    Ok(Observables {
        energy: 0.5 * xi.sobolev_sq(-1.0),
        enstrophy: 0.5 * xi.sobolev_sq(0.0),
        h1: xi.sobolev_sq(1.0).sqrt(),
        h2: xi.sobolev_sq(2.0).sqrt(),
        l3: norm_lp(xi, 3.0, m)?,
    })
}

/// Observables of one trajectory at its save times (excluding `t = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path_id: u64,
    pub initial: Observables,
    pub times: Vec<f64>,
    pub values: Vec<Observables>,
    pub snapshots: Vec<SpectralField>,
    pub terminal: SpectralField,
}

pub fn path_csv_header() -> String {
    format!("path_id,t,{}", OBSERVABLE_NAMES.join(","))
}

impl PathRecord {
    /// Data rows in the [`path_csv_header`] layout.
    pub fn write_csv_rows<W: Write>(&self, mut w: W) -> Result<()> {
        for (t, o) in self.times.iter().zip(&self.values) {
            write!(w, "{},{:e}", self.path_id, t)?;
            for v in o.values() {
                write!(w, ",{v:e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn attach_history(err: HvError, history: &[(f64, f64)]) -> HvError {
    match err {
        HvError::BlowUp { time, norm, .. } => HvError::BlowUp { time, norm, history: history.to_vec() },
        e => e,
    }
}

/// Integrate one trajectory. The noise stream is keyed by
/// `(cfg.seed, path_id)`, so the record depends on nothing else.
pub fn integrate_path(cfg: &SimConfig, path_id: u64) -> Result<PathRecord> {
    let mut stepper = Stepper::new(cfg)?;
    integrate_path_with(cfg, path_id, &mut stepper)
}

/// As [`integrate_path`], reusing a stepper built for `cfg`.
pub fn integrate_path_with(cfg: &SimConfig, path_id: u64, stepper: &mut Stepper) -> Result<PathRecord> {
    let initial = make_initial(&cfg.initial, cfg.n)?;
    let mut state = TrajectoryState::start(cfg.system, initial);
    let mut rng = RngStream::new(cfg.seed, path_id, StreamPurpose::Noise);
    let mut dw = WienerIncrement::zeros(cfg.dt, state.field.lattice().clone());
    let steps = cfg.steps();
    let initial_obs = observables(&state.physical())?;
    let mut history = vec![(0.0, state.physical().l2_norm())];
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut snapshots = Vec::new();
    for s in 1..=steps {
        fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
        stepper.step(&mut state, &dw).map_err(|e| attach_history(e, &history))?;
        if s % cfg.save_every == 0 || s == steps {
            let u = state.physical();
            history.push((state.t, u.l2_norm()));
            times.push(state.t);
            values.push(observables(&u)?);
            if cfg.snapshots {
                snapshots.push(u);
            }
        }
    }
    Ok(PathRecord { path_id, initial: initial_obs, times, values, snapshots, terminal: state.physical() })
}

/// Residual of the deterministic energy balance along one noiseless run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBalance {
    pub times: Vec<f64>,
    /// `‖u(t)‖² - ‖u(0)‖² + 2∫‖u‖²_{H^{1+c}}`
    pub residual: Vec<f64>,
    /// `2∫⟨B₂(u, Tu), u⟩` scaled by the stretching multiplier (zero for the
    /// transport system).
    pub stretching_work: Vec<f64>,
    pub initial_sq: f64,
}

impl EnergyBalance {
    pub fn final_residual(&self) -> f64 {
        *self.residual.last().unwrap_or(&0.0)
    }

    pub fn final_work(&self) -> f64 {
        *self.stretching_work.last().unwrap_or(&0.0)
    }
}

/// Left-endpoint bookkeeping of the L2 balance for a noiseless run of a
/// direct system.
pub fn deterministic_energy_balance(cfg: &SimConfig) -> Result<EnergyBalance> {
    if cfg.noise_scale != 0.0 {
        return Err(invalid_arg("energy balance needs noise_scale = 0"));
    }
    if cfg.system.is_difference() {
        return Err(HvError::Unsupported("energy balance runs on the direct systems".into()));
    }
    let mut stepper = Stepper::new(cfg)?;
    let u0 = make_initial(&cfg.initial, cfg.n)?;
    let initial_sq = u0.sobolev_sq(0.0);
    let mut state = TrajectoryState::start(cfg.system, u0);
    let dw = WienerIncrement::zeros(cfg.dt, state.field.lattice().clone());
    let a = 1.0 + cfg.c;
    let (mut diss, mut work) = (0.0, 0.0);
    let mut out = EnergyBalance { times: vec![0.0], residual: vec![0.0], stretching_work: vec![0.0], initial_sq };
    for _ in 0..cfg.steps() {
        let u = &state.field;
        diss += 2.0 * cfg.dt * u.sobolev_sq(a);
        let drift = if cfg.system.has_transport() {
            let terms = stepper.drift_terms(u)?;
            if cfg.system.has_stretching() {
                work += 2.0 * cfg.dt * cfg.stretching_scale * terms.stretching.inner(u);
            }
            Some(stepper.assemble_drift(&terms))
        } else {
            None
        };
        stepper.advance(&mut state, &dw, drift.as_ref())?;
        out.times.push(state.t);
        out.residual.push(state.field.sobolev_sq(0.0) - initial_sq + diss);
        out.stretching_work.push(work);
    }
    Ok(out)
}

/// Monte Carlo check of the truncated velocity-level Itô energy identity
/// `E‖v(t)‖² + 2∫E‖v‖²_{H^{1+c}} = ‖v(0)‖² + 4 t S_n`,
/// `S_n = Σ_{0<|k|≤n} |k|^{-2(2b+1)}` over the full lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticEnergyReport {
    pub paths: usize,
    pub t: f64,
    /// Sample mean of `‖v(T)‖² + 2∫‖v‖²_{H^{1+c}}`.
    pub lhs_mean: f64,
    pub lhs_stderr: f64,
    pub initial_sq: f64,
    pub trace_sum: f64,
    /// `‖v(0)‖² + 4 T S_n · noise_scale²`
    pub rhs: f64,
    pub relative_discrepancy: f64,
}

/// `S_n` for colour `b`: `Σ_{0<|k|≤n} |k|^{-2(2b+1)}` over the full lattice.
pub fn velocity_trace_sum(n: usize, b: f64) -> Result<f64> {
    let lattice = Lattice::shared(n)?;
    Ok(lattice.modes().iter().map(|m| 2.0 * m.k2.powf(-(2.0 * b + 1.0))).sum())
}

pub fn stochastic_energy_identity(cfg: &SimConfig) -> Result<StochasticEnergyReport> {
    use rayon::prelude::*;
    if cfg.system.is_difference() {
        return Err(HvError::Unsupported("energy identity runs on the direct systems".into()));
    }
    if cfg.paths < 2 {
        return Err(invalid_arg("energy identity needs at least two paths"));
    }
    let base = Stepper::new(cfg)?;
    let u0 = make_initial(&cfg.initial, cfg.n)?;
    let initial_sq = u0.sobolev_sq(-1.0);
    let a = cfg.c; // ‖v‖_{H^{1+c}} = ‖ξ‖_{H^c}
    let samples: Vec<f64> = (0..cfg.paths as u64)
        .into_par_iter()
        .map_init(
            || base.clone(),
            |stepper, p| -> Result<f64> {
                let mut state = TrajectoryState::start(cfg.system, u0.clone());
                let mut rng = RngStream::new(cfg.seed, p, StreamPurpose::Noise);
                let mut dw = WienerIncrement::zeros(cfg.dt, u0.lattice().clone());
                let mut diss = 0.0;
                for _ in 0..cfg.steps() {
                    diss += 2.0 * cfg.dt * state.field.sobolev_sq(a);
                    fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
                    stepper.step(&mut state, &dw)?;
                }
                Ok(state.field.sobolev_sq(-1.0) + diss)
            },
        )
        .collect::<Result<_>>()?;
    let (lhs_mean, lhs_stderr) = crate::noise::mean_stderr(&samples);
    let trace_sum = velocity_trace_sum(cfg.n, cfg.b)?;
    let rhs = initial_sq + 4.0 * cfg.t_end * trace_sum * cfg.noise_scale * cfg.noise_scale;
    Ok(StochasticEnergyReport {
        paths: cfg.paths,
        t: cfg.t_end,
        lhs_mean,
        lhs_stderr,
        initial_sq,
        trace_sum,
        rhs,
        relative_discrepancy: (lhs_mean - rhs).abs() / rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceRow {
    pub eps: f64,
    /// `sup_{t ≤ T} ‖u_ε(t) - u(t)‖_{L2}` over the step grid.
    pub sup_diff: f64,
    pub ratio: f64,
    /// `‖u_ε(T) - u(T)‖_{L2} / ε`. The sup includes `t = 0`, where the
    /// separation is exactly `ε`, so `ratio` alone is close to 1 whenever the
    /// dynamics contract.
    pub terminal_ratio: f64,
}

/// Perturb the initial data by `ε φ` (`φ` a fixed random unit field) and
/// track the separation along one shared noise path.
pub fn continuous_dependence_probe(cfg: &SimConfig, eps_list: &[f64]) -> Result<Vec<DependenceRow>> {
    let mut stepper = Stepper::new(cfg)?;
    let u0 = make_initial(&cfg.initial, cfg.n)?;
    let mut prng = RngStream::new(cfg.seed, 0, StreamPurpose::Perturbation);
    let phi = SpectralField::random(u0.lattice().clone(), &mut prng, |k| k.powf(-3.5));
    let phi = phi.scaled(1.0 / phi.l2_norm());

    let mut run = |init: SpectralField| -> Result<Vec<SpectralField>> {
        let mut state = TrajectoryState::start(cfg.system, init);
        let mut rng = RngStream::new(cfg.seed, 0, StreamPurpose::Noise);
        let mut dw = WienerIncrement::zeros(cfg.dt, u0.lattice().clone());
        let mut out = Vec::with_capacity(cfg.steps() + 1);
        out.push(state.physical());
        for _ in 0..cfg.steps() {
            fill_wiener_increment(&mut dw, cfg.dt, &mut rng)?;
            stepper.step(&mut state, &dw)?;
            out.push(state.physical());
        }
        Ok(out)
    };
    let base = run(u0.clone())?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut init = u0.clone();
        init.axpy(eps, &phi);
        let other = run(init)?;
        let sup_diff = base.iter().zip(&other).map(|(a, b)| a.sub(b).l2_norm()).fold(0.0, f64::max);
        let terminal = base.last().expect("nonempty").sub(other.last().expect("nonempty")).l2_norm();
        let (ratio, terminal_ratio) = if eps == 0.0 { (0.0, 0.0) } else { (sup_diff / eps, terminal / eps) };
        rows.push(DependenceRow { eps, sup_diff, ratio, terminal_ratio });
    }
    Ok(rows)
}
