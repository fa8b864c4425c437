//! C ABI over the hypervort simulator.
//!
//! Every entry point returns an [`HvStatus`]; on failure the message is kept
//! per thread and read with [`hv_last_error_message`]. Handles are opaque and
//! owned by the caller until passed to the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hypervort::config::{parse_config_str, ExperimentConfig, Purpose};
use hypervort::dynamics::{make_initial, observables, Stepper, TrajectoryState};
use hypervort::girsanov::mc_compare_laws;
use hypervort::noise::{fill_wiener_increment, ou_expected_sobolev_sq, NoiseSpec, WienerIncrement};
use hypervort::rng::{RngStream, StreamPurpose};
use hypervort::HvError;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    BlowUp = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
    Other = 8,
}

/// Configuration parsed from TOML.
pub struct HvConfig {
    inner: ExperimentConfig,
}

/// One trajectory advanced step by step.
pub struct HvSimulation {
    cfg: ExperimentConfig,
    stepper: Stepper,
    state: TrajectoryState,
    rng: RngStream,
    dw: WienerIncrement,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HvObservables {
    pub energy: f64,
    pub enstrophy: f64,
    pub h1: f64,
    pub h2: f64,
    pub l3: f64,
}

/// Summary of a law comparison on enstrophy and energy.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HvLawSummary {
    pub mean_weight: f64,
    pub weight_stderr: f64,
    pub effective_sample_size: f64,
    pub enstrophy_z: f64,
    pub energy_z: f64,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &HvError) -> HvStatus {
    match e {
        HvError::InvalidArgument(_) | HvError::Aliasing { .. } | HvError::TruncationMismatch { .. } => HvStatus::InvalidArgument,
        HvError::InvalidConfig(_) | HvError::ConfigKey { .. } | HvError::Unsupported(_) => HvStatus::InvalidConfig,
        HvError::BlowUp { .. } => HvStatus::BlowUp,
        HvError::Io(_) => HvStatus::Io,
        _ => HvStatus::Other,
    }
}

/// Run `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (HvStatus, String)>) -> HvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HvStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            HvStatus::Panic
        }
    }
}

fn lift<T>(r: hypervort::Result<T>) -> Result<T, (HvStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HvStatus, String) {
    (HvStatus::NullPointer, format!("{what} is null"))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, or 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hv_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn hv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a TOML experiment description into a new handle.
///
/// # Safety
/// `toml` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_config_from_toml(toml: *const c_char, out: *mut *mut HvConfig) -> HvStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml).to_str().map_err(|e| (HvStatus::InvalidArgument, e.to_string()))?;
        let (inner, _) = lift(parse_config_str(text, Purpose::Simulate))?;
        *out = Box::into_raw(Box::new(HvConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`hv_config_from_toml`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hv_config_free(cfg: *mut HvConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn hv_config_set_seed(cfg: *mut HvConfig, seed: u64) -> HvStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.inner.sim.seed = seed;
        Ok(())
    })
}

/// Start trajectory `path_id` of the configured ensemble at `t = 0`.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_new(cfg: *const HvConfig, path_id: u64, out: *mut *mut HvSimulation) -> HvStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sim = &cfg.inner.sim;
        let stepper = lift(Stepper::new(sim))?;
        let initial = lift(make_initial(&sim.initial, sim.n))?;
        let dw = WienerIncrement::zeros(sim.dt, initial.lattice().clone());
        let state = TrajectoryState::start(sim.system, initial);
        let rng = RngStream::new(sim.seed, path_id, StreamPurpose::Noise);
        *out = Box::into_raw(Box::new(HvSimulation { cfg: cfg.inner.clone(), stepper, state, rng, dw }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_free(sim: *mut HvSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advance by `steps` time steps. The noise sequence matches the CLI's
/// `simulate` for the same seed and path id.
///
/// # Safety
/// `sim` must be a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_step(sim: *mut HvSimulation, steps: usize) -> HvStatus {
    guard(|| {
        let s = sim.as_mut().ok_or_else(|| null("sim"))?;
        let dt = s.cfg.sim.dt;
        for _ in 0..steps {
            lift(fill_wiener_increment(&mut s.dw, dt, &mut s.rng))?;
            lift(s.stepper.step(&mut s.state, &s.dw))?;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live simulation handle and `t` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_time(sim: *const HvSimulation, t: *mut f64) -> HvStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let t = t.as_mut().ok_or_else(|| null("t"))?;
        *t = s.state.t;
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live simulation handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_observables(sim: *const HvSimulation, out: *mut HvObservables) -> HvStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let o = lift(observables(&s.state.physical()))?;
        *out = HvObservables { energy: o.energy, enstrophy: o.enstrophy, h1: o.h1, h2: o.h2, l3: o.l3 };
        Ok(())
    })
}

/// Number of stored (half-lattice) modes.
///
/// # Safety
/// `sim` must be a live simulation handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_mode_count(sim: *const HvSimulation, out: *mut usize) -> HvStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.state.field.lattice().len();
        Ok(())
    })
}

/// Write the stored modes: `kx, ky, kz` into `k` (3 per mode) and
/// `re u1, im u1, re u2, im u2` of the vorticity into `coeffs` (4 per mode).
/// Either buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must hold `3 * modes` and `4 * modes` elements, where
/// `modes` is given as `capacity` and must be at least the mode count.
#[no_mangle]
pub unsafe extern "C" fn hv_simulation_coefficients(
    sim: *const HvSimulation,
    k: *mut i32,
    coeffs: *mut f64,
    capacity: usize,
) -> HvStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let field = s.state.physical();
        let modes = field.modes();
        if capacity < modes.len() {
            return Err((HvStatus::BufferTooSmall, format!("need room for {} modes, got {capacity}", modes.len())));
        }
        for (i, (m, c)) in modes.iter().zip(field.coeffs()).enumerate() {
            if !k.is_null() {
                *k.add(3 * i) = m.k.kx;
                *k.add(3 * i + 1) = m.k.ky;
                *k.add(3 * i + 2) = m.k.kz;
            }
            if !coeffs.is_null() {
                *coeffs.add(4 * i) = c[0].re;
                *coeffs.add(4 * i + 1) = c[0].im;
                *coeffs.add(4 * i + 2) = c[1].re;
                *coeffs.add(4 * i + 3) = c[1].im;
            }
        }
        Ok(())
    })
}

/// Closed-form `E‖ζ(t)‖²_{H^a}` of the truncated OU process from zero.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_ou_expected_sobolev_sq(b: f64, c: f64, n: usize, a: f64, t: f64, out: *mut f64) -> HvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = lift(NoiseSpec::new(b, c, n))?;
        *out = lift(ou_expected_sobolev_sq(&spec, a, t))?;
        Ok(())
    })
}

/// Compare the full and transport-only laws on enstrophy and energy with
/// `paths` samples per ensemble.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hv_compare_laws(cfg: *const HvConfig, paths: usize, out: *mut HvLawSummary) -> HvStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = lift(mc_compare_laws(&cfg.inner.sim, &["enstrophy", "energy"], paths))?;
        *out = HvLawSummary {
            mean_weight: r.mean_weight,
            weight_stderr: r.weight_stderr,
            effective_sample_size: r.effective_sample_size,
            enstrophy_z: r.observables[0].z_score,
            energy_z: r.observables[1].z_score,
            passed: r.passed,
        };
        Ok(())
    })
}
