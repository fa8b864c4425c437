//! End-to-end runs of the command-line front end.

use std::fs;
use std::path::Path;
use std::process::Command;

use clap::Parser;
use hypervort::cli::{run, Cli, RunManifest, EXIT_CONFIG, EXIT_OK, MANIFEST_FILE};

const SIM: &str = "[physics]\nc = 1.0\nb = 1.0\n[numerics]\nn = 3\nT = 0.01\ndt = 0.001\nsave_every = 5\n[noise]\nseed = 42\n[experiment]\npaths = 12\nsnapshots = true\n";
const GIRSANOV: &str = "[numerics]\nn = 2\nT = 0.01\ndt = 0.001\n[experiment]\npaths = 40\ncheck_times = [0.005, 0.01]\n";

fn run_in(dir: &Path, cmd: &str, toml: &str, threads: usize) -> (i32, RunManifest) {
    let cfg = dir.join("cfg.toml");
    fs::write(&cfg, toml).unwrap();
    let out = dir.join(format!("{cmd}-{threads}"));
    let cli = Cli::try_parse_from([
        "hypervort",
        cmd,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        &threads.to_string(),
    ])
    .unwrap();
    let code = run(&cli);
    let m = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    (code, m)
}

#[test]
fn artifacts_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, toml) in [("simulate", SIM), ("girsanov", GIRSANOV)] {
        let (c1, m1) = run_in(dir.path(), cmd, toml, 1);
        let (c8, m8) = run_in(dir.path(), cmd, toml, 8);
        assert_eq!(c1, c8);
        assert!(!m1.files.is_empty());
        assert_eq!(m1.files, m8.files, "{cmd}");
    }
}

#[test]
fn binary_honours_env_threads_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[physics]\nsystem = \"linear_ou\"\n[numerics]\nn = 2\nT = 0.001\ndt = 0.001\n[experiment]\npaths = 1\n").unwrap();
    let out = dir.path().join("o");
    let status = Command::new(env!("CARGO_BIN_EXE_hypervort"))
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "9"])
        .env("HYPERVORT_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let csv = fs::read_to_string(out.join("paths.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(m.seed, 9);
    assert_eq!(m.version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn binary_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[noise]\ncolour = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hypervort"))
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("noise.colour"));
}

#[test]
fn check_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run_in(dir.path(), "check", "", 1);
    assert_eq!(code, EXIT_OK);
    assert!(m.passed);
    assert_eq!(m.files[0].name, "check.json");
}

#[test]
fn ou_scan_subcommand_writes_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "[experiment]\npaths = 200\nscan_n = [4, 8, 12]\n";
    let (code, m) = run_in(dir.path(), "ou-scan", toml, 1);
    assert_eq!(code, EXIT_OK);
    let names: Vec<_> = m.files.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["ou_scan.csv", "ou_scan.json"]);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            hypervort::config::parse_config(&path, hypervort::config::Purpose::Simulate)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
