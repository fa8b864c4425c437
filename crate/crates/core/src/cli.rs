//! Command-line front end: argument parsing, experiment dispatch, artifact
//! writing and the run manifest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checks::{run_property_suite, CheckResult};
use crate::config::{parse_config_str, ExperimentConfig, Purpose};
use crate::dynamics::{integrate_path_with, path_csv_header, PathRecord, SimConfig, Stepper};
use crate::error::{HvError, Result};
use crate::girsanov::{martingale_check, mc_compare_laws, MartingalePoint};
use crate::noise::{ou_regularity_scan, RegularityTable};

/// Allowed deviation of a fitted scan slope from its prediction.
pub const SLOPE_TOLERANCE: f64 = 0.3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_OTHER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hypervort", version, about = "Stochastic hyperviscous vorticity simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quick invariant suite.
    Check(CommonArgs),
    /// Integrate an ensemble and write per-path observables.
    Simulate(CommonArgs),
    /// Sobolev growth of the linear OU process against truncation.
    OuScan(CommonArgs),
    /// Monte Carlo law comparison by Girsanov reweighting.
    Girsanov(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML experiment file, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `noise.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, env = "HYPERVORT_THREADS")]
    pub threads: Option<usize>,
}

impl Command {
    pub fn purpose(&self) -> Purpose {
        match self {
            Command::Check(_) => Purpose::Check,
            Command::Simulate(_) => Purpose::Simulate,
            Command::OuScan(_) => Purpose::OuScan,
            Command::Girsanov(_) => Purpose::Girsanov,
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Check(a) | Command::Simulate(a) | Command::OuScan(a) | Command::Girsanov(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Provenance record written next to every run's artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Purpose,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub files: Vec<FileDigest>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Outcome of one subcommand, before the manifest is written.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<String>,
    pub passed: bool,
    /// Set when a trajectory blew up.
    pub blow_up: bool,
}

pub fn sha256_file(path: &Path) -> Result<FileDigest> {
    let data = fs::read(path)?;
    Ok(FileDigest {
        name: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        bytes: data.len() as u64,
        sha256: hex::encode(Sha256::digest(&data)),
    })
}

/// Load a TOML experiment file, or the config snapshot of a manifest.
/// Returns the seed stored in the manifest, if any.
pub fn load_config(path: &Path, purpose: Purpose) -> Result<(ExperimentConfig, Vec<String>, Option<u64>)> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let m: RunManifest = serde_json::from_str(&text)?;
        m.config.sim.validate()?;
        let warnings = crate::config::regime_warnings(&m.config.sim, purpose);
        return Ok((m.config, warnings, Some(m.seed)));
    }
    let (cfg, warnings) = parse_config_str(&text, purpose)?;
    Ok((cfg, warnings, None))
}

fn write_text(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), text)?;
    files.push(name.to_string());
    Ok(())
}

fn write_with(dir: &Path, name: &str, files: &mut Vec<String>, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(dir.join(name))?);
    f(&mut w)?;
    w.flush()?;
    files.push(name.to_string());
    Ok(())
}

#[derive(Serialize)]
struct BlowUpDiagnostic<'a> {
    path_id: u64,
    time: f64,
    norm: f64,
    history: &'a [(f64, f64)],
    config: &'a SimConfig,
}

fn run_check(dir: &Path) -> Result<RunOutcome> {
    let results: Vec<CheckResult> = run_property_suite()?;
    for r in &results {
        log::info!("{} {} (value {:.3e}, bound {:.1e})", if r.pass { "PASS" } else { "FAIL" }, r.name, r.value, r.bound);
    }
    let mut files = Vec::new();
    write_text(dir, "check.json", &serde_json::to_string_pretty(&results)?, &mut files)?;
    Ok(RunOutcome { files, passed: results.iter().all(|r| r.pass), blow_up: false })
}

fn run_simulate(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let sim = &cfg.sim;
    let proto = Stepper::new(sim)?;
    let mut records: Vec<Result<PathRecord>> = (0..sim.paths as u64)
        .into_par_iter()
        .map_init(|| proto.clone(), |stepper, id| integrate_path_with(sim, id, stepper))
        .collect();
    if let Some(pos) = records.iter().position(|r| matches!(r, Err(e) if !matches!(e, HvError::BlowUp { .. }))) {
        return Err(records.swap_remove(pos).err().expect("error entry"));
    }
    let mut files = Vec::new();
    write_with(dir, "paths.csv", &mut files, |w| {
        writeln!(w, "{}", path_csv_header())?;
        for r in records.iter().flatten() {
            r.write_csv_rows(&mut *w)?;
        }
        Ok(())
    })?;
    if sim.snapshots {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        for r in records.iter().flatten() {
            for (i, s) in r.snapshots.iter().enumerate() {
                let name = format!("snapshots/path{:05}_save{:04}.csv", r.path_id, i + 1);
                write_with(dir, &name, &mut files, |w| s.write_csv(&mut *w))?;
            }
        }
    }
    let mut blow_up = false;
    for (id, r) in records.iter().enumerate() {
        match r {
            Ok(_) => {}
            Err(HvError::BlowUp { time, norm, history }) => {
                if !blow_up {
                    let diag = BlowUpDiagnostic { path_id: id as u64, time: *time, norm: *norm, history, config: sim };
                    write_text(dir, "simulate.diag.json", &serde_json::to_string_pretty(&diag)?, &mut files)?;
                    log::error!("path {id} blew up at t = {time} (L2 norm {norm})");
                }
                blow_up = true;
            }
            Err(_) => unreachable!("non-blow-up errors returned above"),
        }
    }
    Ok(RunOutcome { files, passed: !blow_up, blow_up })
}

/// Scan table plus per-entry gate verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub table: RegularityTable,
    pub tolerance: f64,
    pub pass: Vec<bool>,
    pub passed: bool,
}

pub fn ou_scan_report(cfg: &ExperimentConfig) -> Result<ScanReport> {
    let table = ou_regularity_scan(&cfg.scan.grid, &cfg.scan.n_list, cfg.scan.t, cfg.sim.paths, cfg.sim.seed)?;
    let pass: Vec<bool> = table
        .slopes
        .iter()
        .map(|s| s.slope.is_finite() && (s.slope - s.predicted).abs() <= SLOPE_TOLERANCE)
        .collect();
    let passed = pass.iter().all(|&p| p);
    Ok(ScanReport { table, tolerance: SLOPE_TOLERANCE, pass, passed })
}

fn run_ou_scan(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let report = ou_scan_report(cfg)?;
    let mut files = Vec::new();
    write_with(dir, "ou_scan.csv", &mut files, |w| {
        writeln!(w, "b,c,a,n,mean,stderr,exact")?;
        for r in &report.table.rows {
            writeln!(w, "{},{},{},{},{:e},{:e},{:e}", r.b, r.c, r.a, r.n, r.mean, r.stderr, r.exact)?;
        }
        Ok(())
    })?;
    write_text(dir, "ou_scan.json", &serde_json::to_string_pretty(&report)?, &mut files)?;
    for (s, p) in report.table.slopes.iter().zip(&report.pass) {
        log::info!(
            "{} (b, c, a) = ({}, {}, {}): slope {:.3}, predicted {:.3}",
            if *p { "PASS" } else { "FAIL" },
            s.b,
            s.c,
            s.a,
            s.slope,
            s.predicted
        );
    }
    Ok(RunOutcome { files, passed: report.passed, blow_up: false })
}

fn run_girsanov(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let names: Vec<&str> = cfg.observables.iter().map(String::as_str).collect();
    let report = mc_compare_laws(&cfg.sim, &names, cfg.sim.paths)?;
    let mut files = Vec::new();
    write_text(dir, "girsanov_report.json", &report.to_json()?, &mut files)?;
    write_with(dir, "girsanov_report.csv", &mut files, |w| report.write_csv(&mut *w))?;
    let mut passed = report.passed;
    // up to 1% blow-ups are tolerated by the report; any are logged
    let any_blow_up = report.blow_ups_direct + report.blow_ups_weighted > 0;
    let mut blow_up = !report.blow_up_pass;
    if !report.weights_identically_one && !cfg.check_times.is_empty() {
        match martingale_check(&cfg.sim, cfg.sim.paths, &cfg.check_times) {
            Ok(points) => {
                let ok = martingale_ok(&points);
                passed &= ok;
                write_with(dir, "martingale.csv", &mut files, |w| {
                    writeln!(w, "t,mean_weight,stderr,pass")?;
                    for p in &points {
                        let z = (p.mean - 1.0).abs() / p.stderr.max(f64::MIN_POSITIVE);
                        writeln!(w, "{:e},{:e},{:e},{}", p.t, p.mean, p.stderr, z <= 3.0)?;
                    }
                    Ok(())
                })?;
            }
            Err(HvError::BlowUp { time, .. }) => {
                log::error!("martingale check path blew up at t = {time}");
                blow_up = true;
                passed = false;
            }
            Err(e) => return Err(e),
        }
    }
    if any_blow_up || blow_up {
        let diag = serde_json::json!({
            "blow_ups_direct": report.blow_ups_direct,
            "blow_ups_weighted": report.blow_ups_weighted,
            "paths": report.paths,
            "config": &cfg.sim,
        });
        write_text(dir, "girsanov.diag.json", &serde_json::to_string_pretty(&diag)?, &mut files)?;
    }
    log::info!("{} mean weight {:.4} +- {:.4}", if report.weight_pass { "PASS" } else { "FAIL" }, report.mean_weight, report.weight_stderr);
    for o in &report.observables {
        log::info!(
            "{} {}: direct {:.6e}, weighted {:.6e}, z {:.2}",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.direct_mean,
            o.weighted_mean,
            o.z_score
        );
    }
    log::info!("effective sample size {:.1} of {}", report.effective_sample_size, report.paths);
    Ok(RunOutcome { files, passed, blow_up })
}

/// `E[W(t)] = 1` within three standard errors at every checkpoint.
pub fn martingale_ok(points: &[MartingalePoint]) -> bool {
    points.iter().all(|p| p.stderr == 0.0 && p.mean == 1.0 || (p.mean - 1.0).abs() <= 3.0 * p.stderr)
}

/// Run one subcommand inside the current thread pool and write the manifest.
pub fn execute(command: &Command) -> Result<(RunManifest, RunOutcome)> {
    let args = command.args();
    let purpose = command.purpose();
    let (mut cfg, warnings, manifest_seed) = load_config(&args.config, purpose)?;
    if let Some(seed) = args.seed.or(manifest_seed) {
        cfg.sim.seed = seed;
    }
    fs::create_dir_all(&args.out)?;
    let dir = args.out.as_path();
    let outcome = match command {
        Command::Check(_) => run_check(dir)?,
        Command::Simulate(_) => run_simulate(&cfg, dir)?,
        Command::OuScan(_) => run_ou_scan(&cfg, dir)?,
        Command::Girsanov(_) => run_girsanov(&cfg, dir)?,
    };
    let files = outcome.files.iter().map(|f| sha256_file(&dir.join(f)).map(|d| FileDigest { name: f.clone(), ..d })).collect::<Result<_>>()?;
    let manifest = RunManifest {
        tool: "hypervort".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: purpose,
        seed: cfg.sim.seed,
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        config: cfg,
        warnings,
        passed: outcome.passed,
        files,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok((manifest, outcome))
}

/// Parse-free entry point used by `main` and by tests: builds the thread
/// pool, runs, and maps the result to an exit code.
pub fn run(cli: &Cli) -> i32 {
    let threads = cli.command.args().threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return EXIT_OTHER;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok((_, outcome)) if outcome.blow_up => EXIT_BLOW_UP,
        Ok((_, outcome)) if !outcome.passed => EXIT_GATE_FAILED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HvError::ConfigKey { .. } | HvError::InvalidConfig(_) => EXIT_CONFIG,
                _ => EXIT_OTHER,
            }
        }
    }
}
