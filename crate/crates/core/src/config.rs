//! Experiment configuration files.
//!
//! TOML with four sections, every key optional:
//!
//! ```toml
//! [physics]
//! c = 1.0                    # hyperviscosity correction
//! b = 1.0                    # noise colour
//! system = "full_vorticity"  # transport_only | linear_ou | difference_beta | difference_delta
//! stretching_scale = 1.0
//!
//! [numerics]
//! n = 3
//! T = 0.1
//! dt = 1e-3
//! save_every = 10
//! noise_treatment = "ito_point"   # or "exact_ou"
//!
//! [noise]
//! scale = 1.0
//! seed = 0
//!
//! [experiment]
//! paths = 2000
//! initial = "smooth_random"  # zero | single_mode
//! decay = 7.0
//! amplitude = 1.0
//! initial_seed = 0
//! mode = [0, 0, 1]           # single_mode only
//! observables = ["enstrophy", "energy"]
//! snapshots = false
//! scan_a = 2.0               # ou-scan: Sobolev index when an entry omits it
//! scan_grid = [[1.0, 1.0, 2.0], [0.0, 0.0, 0.0]]   # [b, c] or [b, c, a]
//! scan_n = [4, 8, 12, 16]
//! scan_t = 1.0               # ou-scan horizon
//! check_times = [0.025, 0.05, 0.1]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::dynamics::{InitialSpec, NoiseTreatment, SimConfig, SystemKind, OBSERVABLE_NAMES};
use crate::error::{HvError, Result};

/// Which experiment the configuration feeds; only affects warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Purpose {
    Check,
    Simulate,
    OuScan,
    Girsanov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Default Sobolev index for grid entries that omit it.
    pub a: f64,
    /// `(b, c, a)` triples.
    pub grid: Vec<(f64, f64, f64)>,
    pub n_list: Vec<usize>,
    /// Horizon of the scan; long enough for the low shells to saturate.
    pub t: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { a: 2.0, grid: vec![(1.0, 1.0, 2.0), (0.0, 0.0, 0.0)], n_list: vec![4, 8, 12, 16], t: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub observables: Vec<String>,
    pub scan: ScanSettings,
    pub check_times: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            observables: vec!["enstrophy".into(), "energy".into()],
            scan: ScanSettings::default(),
            check_times: vec![0.025, 0.05, 0.1],
        }
    }
}

fn key_err(key: &str, reason: impl Into<String>) -> HvError {
    HvError::ConfigKey { key: key.to_string(), reason: reason.into() }
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn full(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !allowed.contains(&k.as_str()) {
                    return Err(key_err(&self.full(k), "unknown key"));
                }
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn float(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Float(x)) => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(key_err(&self.full(key), "expected a number")),
        }
    }

    fn uint(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(_) => Err(key_err(&self.full(key), "expected a nonnegative integer")),
        }
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(key_err(&self.full(key), "expected true or false")),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(key_err(&self.full(key), "expected a string")),
        }
    }

    fn array(&self, key: &str) -> Result<Option<&'a Vec<Value>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(_) => Err(key_err(&self.full(key), "expected an array")),
        }
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(a) = self.array(key)? else { return Ok(None) };
        a.iter()
            .map(|v| match v {
                Value::Float(x) => Ok(*x),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(key_err(&self.full(key), "expected an array of numbers")),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn section<'a>(root: &'a Table, name: &'static str) -> Result<Section<'a>> {
    match root.get(name) {
        None => Ok(Section { name, table: None }),
        Some(Value::Table(t)) => Ok(Section { name, table: Some(t) }),
        Some(_) => Err(key_err(name, "expected a table")),
    }
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str, key: &str) -> Result<T> {
    T::deserialize(Value::String(s.to_string())).map_err(|_| key_err(key, format!("unrecognised value `{s}`")))
}

/// Parse and validate configuration text. Returns the configuration and the
/// warnings raised for parameters outside the theorem regime.
pub fn parse_config_str(text: &str, purpose: Purpose) -> Result<(ExperimentConfig, Vec<String>)> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| HvError::InvalidConfig(e.message().to_string()))?;
    for k in root.keys() {
        if !["physics", "numerics", "noise", "experiment"].contains(&k.as_str()) {
            return Err(key_err(k, "unknown section"));
        }
    }
    let physics = section(&root, "physics")?;
    let numerics = section(&root, "numerics")?;
    let noise = section(&root, "noise")?;
    let exp = section(&root, "experiment")?;
    physics.check_keys(&["c", "b", "system", "stretching_scale"])?;
    numerics.check_keys(&["n", "T", "dt", "save_every", "noise_treatment"])?;
    noise.check_keys(&["scale", "seed"])?;
    exp.check_keys(&[
        "paths",
        "initial",
        "decay",
        "amplitude",
        "initial_seed",
        "mode",
        "observables",
        "snapshots",
        "scan_a",
        "scan_grid",
        "scan_n",
        "scan_t",
        "check_times",
    ])?;

    let d = ExperimentConfig::default();
    let mut sim = d.sim.clone();
    sim.c = physics.float("c", sim.c)?;
    sim.b = physics.float("b", sim.b)?;
    if let Some(s) = physics.string("system")? {
        sim.system = parse_enum::<SystemKind>(s, "physics.system")?;
    }
    sim.stretching_scale = physics.float("stretching_scale", sim.stretching_scale)?;

    sim.n = numerics.uint("n", sim.n as u64)? as usize;
    sim.t_end = numerics.float("T", sim.t_end)?;
    sim.dt = numerics.float("dt", sim.dt)?;
    sim.save_every = numerics.uint("save_every", sim.save_every as u64)? as usize;
    if let Some(s) = numerics.string("noise_treatment")? {
        sim.noise_treatment = parse_enum::<NoiseTreatment>(s, "numerics.noise_treatment")?;
    }

    sim.noise_scale = noise.float("scale", sim.noise_scale)?;
    sim.seed = noise.uint("seed", sim.seed)?;

    sim.paths = exp.uint("paths", sim.paths as u64)? as usize;
    sim.snapshots = exp.boolean("snapshots", sim.snapshots)?;
    let kind = exp.string("initial")?.unwrap_or("smooth_random");
    sim.initial = match kind {
        "zero" => InitialSpec::Zero,
        "single_mode" => {
            let k = exp.floats("mode")?.unwrap_or_else(|| vec![0.0, 0.0, 1.0]);
            if k.len() != 3 || k.iter().any(|x| x.fract() != 0.0) {
                return Err(key_err("experiment.mode", "expected three integers"));
            }
            InitialSpec::SingleMode { k: [k[0] as i32, k[1] as i32, k[2] as i32], amplitude: exp.float("amplitude", 1.0)? }
        }
        "smooth_random" => InitialSpec::SmoothRandom {
            seed: exp.uint("initial_seed", 0)?,
            decay: exp.float("decay", 7.0)?,
            amplitude: exp.float("amplitude", 1.0)?,
        },
        other => return Err(key_err("experiment.initial", format!("unrecognised value `{other}`"))),
    };

    let mut cfg = ExperimentConfig { sim, ..d };
    if let Some(a) = exp.array("observables")? {
        let mut names = Vec::with_capacity(a.len());
        for v in a {
            match v {
                Value::String(s) if OBSERVABLE_NAMES.contains(&s.as_str()) => names.push(s.clone()),
                _ => return Err(key_err("experiment.observables", format!("expected names from {OBSERVABLE_NAMES:?}"))),
            }
        }
        cfg.observables = names;
    }
    cfg.scan.a = exp.float("scan_a", cfg.scan.a)?;
    cfg.scan.t = exp.float("scan_t", cfg.scan.t)?;
    if !(cfg.scan.t > 0.0) {
        return Err(key_err("experiment.scan_t", "must be > 0"));
    }
    if let Some(a) = exp.array("scan_grid")? {
        let mut grid = Vec::with_capacity(a.len());
        for v in a {
            let entry = match v {
                Value::Array(p) if p.len() == 2 || p.len() == 3 => {
                    p.iter().map(|x| x.as_float().or(x.as_integer().map(|i| i as f64))).collect::<Option<Vec<_>>>()
                }
                _ => None,
            };
            match entry {
                Some(p) => grid.push((p[0], p[1], p.get(2).copied().unwrap_or(cfg.scan.a))),
                None => return Err(key_err("experiment.scan_grid", "expected [[b, c] or [b, c, a], ...]")),
            }
        }
        cfg.scan.grid = grid;
    }
    if let Some(ns) = exp.floats("scan_n")? {
        if ns.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
            return Err(key_err("experiment.scan_n", "expected positive integers"));
        }
        cfg.scan.n_list = ns.into_iter().map(|x| x as usize).collect();
    }
    if let Some(ts) = exp.floats("check_times")? {
        cfg.check_times = ts;
    }

    validate(&cfg)?;
    let warnings = regime_warnings(&cfg.sim, purpose);
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok((cfg, warnings))
}

pub fn parse_config(path: &Path, purpose: Purpose) -> Result<(ExperimentConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, purpose)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let s = &cfg.sim;
    // name the offending key rather than the struct field
    if s.n == 0 {
        return Err(key_err("numerics.n", "must be >= 1"));
    }
    if !(s.dt > 0.0) {
        return Err(key_err("numerics.dt", "must be > 0"));
    }
    if !(s.c >= 0.0) {
        return Err(key_err("physics.c", "must be >= 0"));
    }
    if !(s.b >= 0.0) {
        return Err(key_err("physics.b", "must be >= 0"));
    }
    if s.save_every == 0 {
        return Err(key_err("numerics.save_every", "must be >= 1"));
    }
    if !(s.t_end >= s.dt) {
        return Err(key_err("numerics.T", "must be >= dt"));
    }
    if let InitialSpec::SmoothRandom { decay, .. } = s.initial {
        if !(decay > 4.5) {
            return Err(key_err("experiment.decay", "must exceed 4.5"));
        }
    }
    s.validate()
}

/// Warnings (not errors) for runs outside the regime where the laws are
/// known to be equivalent.
pub fn regime_warnings(sim: &SimConfig, purpose: Purpose) -> Vec<String> {
    let mut out = Vec::new();
    if purpose == Purpose::Girsanov {
        if sim.c <= 0.5 {
            out.push(format!("c = {} is outside theorem regime c>1/2; running anyway", sim.c));
        }
        if sim.b != 1.0 {
            out.push(format!("b = {} is outside theorem regime b=1; running anyway", sim.b));
        }
        if let InitialSpec::SmoothRandom { decay, .. } = sim.initial {
            if decay < 7.0 {
                out.push(format!("initial decay {decay} < 7 may leave H^2 as n grows"));
            }
        }
    }
    if sim.c < 0.25 && sim.system.has_stretching() {
        out.push(format!("c = {} < 1/4: global existence is not guaranteed", sim.c));
    }
    out
}
