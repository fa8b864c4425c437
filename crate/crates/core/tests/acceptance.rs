//! Acceptance gate. Runs every criterion at full size, prints one PASS/FAIL
//! line each, and exits nonzero if any fails.

use std::fs;
use std::time::{Duration, Instant};

use clap::Parser;
use hypervort::checks::frame_violation;
use hypervort::cli::{run, Cli, RunManifest, MANIFEST_FILE};
use hypervort::dynamics::{
    continuous_dependence_probe, deterministic_energy_balance, stochastic_energy_identity, InitialSpec, SimConfig,
    SystemKind,
};
use hypervort::field::SpectralField;
use hypervort::girsanov::{finiteness_diagnostic, mc_compare_laws};
use hypervort::lattice::{Lattice, WaveVector};
use hypervort::noise::{mean_stderr, ou_exact_step, ou_regularity_scan, NoiseSpec};
use hypervort::nonlinear::{exact_convolution, PaddedProductPlan, ProductForm};
use hypervort::operators::{biot_savart, curl};
use hypervort::rng::{RngStream, StreamPurpose};
use hypervort::transform::{fft_friendly, leray_project, min_grid_dealiased, norm_lp, to_physical, to_spectral, VectorSpectrum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn field(n: usize, seed: u64, decay: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::random(Lattice::shared(n).unwrap(), &mut rng, |k| k.powf(-decay))
}

fn frame_and_transform() -> Verdict {
    let frame = frame_violation(16);
    let mut round = 0.0f64;
    let mut parseval = 0.0f64;
    let mut leray = 0.0f64;
    for (n, s) in [(2, 1), (4, 2), (6, 3), (8, 4)] {
        let f = field(n, s, 1.0);
        let m = fft_friendly(min_grid_dealiased(n));
        round = round.max(to_spectral(&to_physical(&f, m).unwrap(), n).unwrap().max_abs_diff(&f) / f.max_abs_coeff());
        parseval = parseval.max((norm_lp(&f, 2.0, m).unwrap() - f.l2_norm()).abs() / f.l2_norm());
        let lattice = Lattice::shared(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s + 100);
        let vecs = (0..lattice.len())
            .map(|_| std::array::from_fn(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
            .collect();
        let p1 = leray_project(&VectorSpectrum { lattice, vecs });
        leray = leray.max(p1.max_abs_diff(&leray_project(&VectorSpectrum::from_field(&p1))));
    }
    verdict(
        frame <= 1e-12 && round <= 1e-12 && parseval <= 1e-10 && leray <= 1e-12,
        format!("frame {frame:.1e}, round trip {round:.1e}, Parseval {parseval:.1e}, Leray {leray:.1e}"),
    )
}

fn operators_and_products() -> Verdict {
    let xi = field(8, 5, 0.5);
    let inv = curl(&biot_savart(&xi)).rel_l2_diff(&xi).max(biot_savart(&curl(&xi)).rel_l2_diff(&xi));
    let mut plan = PaddedProductPlan::new(4).unwrap();
    let mut tri = 0.0f64;
    for s in 0..100u64 {
        let u = field(4, 1000 + 3 * s, 1.0);
        let v = field(4, 1001 + 3 * s, 1.0);
        let w = field(4, 1002 + 3 * s, 1.0);
        let scale = u.sobolev_sq(1.0).sqrt() * v.l2_norm() * w.l2_norm();
        let uvv = plan.advect(&u, &v).unwrap().inner(&v);
        let anti = plan.advect(&u, &v).unwrap().inner(&w) + plan.advect(&u, &w).unwrap().inner(&v);
        tri = tri.max(uvv.abs() / scale).max(anti.abs() / scale);
    }
    let mut oracle = 0.0f64;
    for n in 1..=4 {
        let xi = field(n, 50 + n as u64, 1.0);
        let v = biot_savart(&xi);
        let (t, s) = PaddedProductPlan::new(n).unwrap().vorticity_terms(&xi, &v).unwrap();
        let scale = xi.l2_norm() * xi.l2_norm() * n as f64;
        let dt = t.sub(&exact_convolution(&xi, &v, ProductForm::Transport).unwrap()).l2_norm();
        let ds = s.sub(&exact_convolution(&xi, &v, ProductForm::Stretching).unwrap()).l2_norm();
        oracle = oracle.max(dt / scale).max(ds / scale);
    }
    verdict(
        inv <= 1e-12 && tri <= 1e-10 && oracle <= 1e-10,
        format!("curl/Biot-Savart {inv:.1e}, trilinear {tri:.1e} over 100 triples, FFT vs oracle {oracle:.1e}"),
    )
}

fn ou_transitions() -> Verdict {
    const SAMPLES: usize = 10_000;
    let spec = NoiseSpec::new(1.0, 1.0, 3).unwrap();
    let t = 0.05;
    let mut worst_var = 0.0f64;
    for (i, k) in [(1, 0, 0), (1, 1, 0), (2, 1, 1)].into_iter().enumerate() {
        let k = WaveVector::new(k.0, k.1, k.2).unwrap();
        let mut rng = RngStream::new(7, i as u64, StreamPurpose::Custom(31));
        let x: Vec<f64> = (0..SAMPLES).map(|_| ou_exact_step(Complex64::new(0.0, 0.0), k, &spec, t, &mut rng).unwrap().norm_sqr()).collect();
        let (m, se) = mean_stderr(&x);
        let target = spec.mode_variance(k.norm_sq() as f64, t);
        worst_var = worst_var.max((m - target).abs() / se);
    }
    let k = WaveVector::new(1, 1, 0).unwrap();
    let z0 = Complex64::new(0.4, -0.1);
    let mut r1 = RngStream::new(7, 0, StreamPurpose::Custom(32));
    let mut r2 = RngStream::new(7, 0, StreamPurpose::Custom(33));
    let one: Vec<Complex64> = (0..SAMPLES).map(|_| ou_exact_step(z0, k, &spec, 2.0 * t, &mut r1).unwrap()).collect();
    let two: Vec<Complex64> = (0..SAMPLES)
        .map(|_| {
            let h = ou_exact_step(z0, k, &spec, t, &mut r2).unwrap();
            ou_exact_step(h, k, &spec, t, &mut r2).unwrap()
        })
        .collect();
    let mut worst_split = 0.0f64;
    let stats: [fn(&Complex64) -> f64; 3] = [|z| z.re, |z| z.im, |z| z.norm_sqr()];
    for f in stats {
        let (ma, sa) = mean_stderr(&one.iter().map(f).collect::<Vec<_>>());
        let (mb, sb) = mean_stderr(&two.iter().map(f).collect::<Vec<_>>());
        worst_split = worst_split.max((ma - mb).abs() / (sa * sa + sb * sb).sqrt());
    }
    verdict(
        worst_var <= 4.0 && worst_split <= 4.0,
        format!("variance off by {worst_var:.2} stderr, two-step vs one-step {worst_split:.2} sigma"),
    )
}

fn ou_scan_slopes() -> Verdict {
    let table = ou_regularity_scan(&[(1.0, 1.0, 2.0), (0.0, 0.0, 0.0)], &[4, 8, 12, 16], 1.0, 500, 0).unwrap();
    let s = &table.slopes;
    verdict(
        s[0].slope.abs() <= 0.3 && (s[1].slope - 1.0).abs() <= 0.3,
        format!("slope {:.3} for (b,c,a) = (1,1,2), {:.3} for (0,0,0)", s[0].slope, s[1].slope),
    )
}

fn energy_balance() -> Verdict {
    let transport = |dt: f64| {
        let cfg = SimConfig {
            n: 4,
            c: 1.0,
            dt,
            t_end: 0.1,
            noise_scale: 0.0,
            system: SystemKind::TransportOnly,
            initial: InitialSpec::SingleMode { k: [0, 0, 1], amplitude: 1.0 },
            ..SimConfig::default()
        };
        let e = deterministic_energy_balance(&cfg).unwrap();
        e.final_residual().abs() / e.initial_sq
    };
    let r1 = transport(1e-4);
    let r2 = transport(5e-5);
    let halving = r1 / r2;
    let cfg = SimConfig {
        n: 4,
        c: 1.0,
        dt: 1e-4,
        t_end: 0.1,
        noise_scale: 0.0,
        system: SystemKind::FullVorticity,
        initial: InitialSpec::SmoothRandom { seed: 1, decay: 7.0, amplitude: 20.0 },
        ..SimConfig::default()
    };
    let e = deterministic_energy_balance(&cfg).unwrap();
    let gap = (e.final_residual() - e.final_work()).abs();
    let rel_initial = gap / e.initial_sq;
    let rel_work = gap / e.final_work().abs();
    let work_visible = e.final_work().abs() / e.initial_sq;
    verdict(
        r1 <= 1e-3 && (halving - 2.0).abs() <= 0.6 && rel_initial <= 1e-3 && work_visible >= 1e-2,
        format!(
            "transport residual {r1:.2e}, halving ratio {halving:.2}, stretching gap {rel_initial:.2e} of the initial norm ({rel_work:.2e} of the work, work/norm {work_visible:.2e})"
        ),
    )
}

fn stochastic_energy() -> Verdict {
    let cfg = SimConfig { n: 3, c: 1.0, b: 1.0, dt: 1e-3, t_end: 0.1, paths: 500, seed: 11, ..SimConfig::default() };
    let r = stochastic_energy_identity(&cfg).unwrap();
    verdict(
        r.relative_discrepancy <= 0.05,
        format!("lhs {:.5e} +- {:.1e}, rhs {:.5e}, relative {:.2e}", r.lhs_mean, r.lhs_stderr, r.rhs, r.relative_discrepancy),
    )
}

fn law_equivalence() -> Verdict {
    let cfg = SimConfig { n: 3, c: 1.0, b: 1.0, dt: 1e-3, t_end: 0.1, paths: 2000, ..SimConfig::default() };
    let r = mc_compare_laws(&cfg, &["enstrophy", "energy"], 2000).unwrap();
    let off = mc_compare_laws(&SimConfig { stretching_scale: 0.0, ..cfg.clone() }, &["enstrophy"], 200).unwrap();
    let zs: Vec<String> = r.observables.iter().map(|o| format!("{} z {:.2}", o.name, o.z_score)).collect();
    let weight_z = (r.mean_weight - 1.0).abs() / r.weight_stderr;
    verdict(
        weight_z <= 3.0 && r.observables.iter().all(|o| o.z_score.abs() <= 3.0) && off.weights_identically_one,
        format!(
            "E[W] = {:.4} ({weight_z:.2} stderr), {}, ESS {:.0}, stretching off W == 1: {}",
            r.mean_weight,
            zs.join(", "),
            r.effective_sample_size,
            off.weights_identically_one
        ),
    )
}

fn girsanov_finiteness() -> Verdict {
    let ns = [2, 3, 4, 6];
    let base = SimConfig { c: 1.0, b: 1.0, dt: 1e-3, t_end: 0.1, ..SimConfig::default() };
    let good = finiteness_diagnostic(&base, &ns, 100).unwrap();
    let bad = finiteness_diagnostic(&SimConfig { c: 0.0, b: 0.0, ..base }, &ns, 100).unwrap();
    let changes: Vec<f64> = good.iter().filter_map(|r| r.relative_change).collect();
    let settling = changes.windows(2).all(|w| w[1] < w[0]);
    let growing = bad.windows(2).all(|w| w[1].mean > w[0].mean);
    let fmt = |rows: &[hypervort::girsanov::FinitenessRow]| rows.iter().map(|r| format!("{:.3e}", r.mean)).collect::<Vec<_>>().join(" ");
    verdict(
        settling && growing,
        format!("b=c=1 means [{}] changes {:?}; b=c=0 means [{}]", fmt(&good), changes.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>(), fmt(&bad)),
    )
}

fn continuous_dependence() -> Verdict {
    let eps = [1e-2, 1e-3, 1e-4];
    let mut spreads = Vec::new();
    for system in [SystemKind::FullVorticity, SystemKind::TransportOnly] {
        let cfg = SimConfig { n: 3, system, ..SimConfig::default() };
        let rows = continuous_dependence_probe(&cfg, &eps).unwrap();
        let spread = |f: fn(&hypervort::dynamics::DependenceRow) -> f64| {
            let hi = rows.iter().map(f).fold(f64::MIN, f64::max);
            let lo = rows.iter().map(f).fold(f64::MAX, f64::min);
            hi / lo
        };
        spreads.push((spread(|r| r.ratio), spread(|r| r.terminal_ratio), rows[0].terminal_ratio));
    }
    verdict(
        spreads.iter().all(|s| s.0 <= 2.0 && s.1 <= 2.0),
        format!(
            "ratio spread sup {:.3} / terminal {:.3} (full, terminal ratio {:.3}), sup {:.3} / terminal {:.3} (transport, terminal ratio {:.3})",
            spreads[0].0, spreads[0].1, spreads[0].2, spreads[1].0, spreads[1].1, spreads[1].2
        ),
    )
}

fn thread_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        ("simulate", "[numerics]\nn = 3\nT = 0.02\ndt = 0.001\n[noise]\nseed = 5\n[experiment]\npaths = 16\n"),
        ("girsanov", "[numerics]\nn = 3\nT = 0.02\ndt = 0.001\n[noise]\nseed = 5\n[experiment]\npaths = 64\ncheck_times = [0.01, 0.02]\n"),
        ("ou-scan", "[experiment]\npaths = 50\nscan_n = [4, 8]\n"),
    ];
    let mut same = true;
    for (cmd, toml) in runs {
        let cfg = dir.path().join(format!("{cmd}.toml"));
        fs::write(&cfg, toml).unwrap();
        let mut digests = Vec::new();
        for threads in [1, 8] {
            let out = dir.path().join(format!("{cmd}-{threads}"));
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
            run(&cli);
            let m: RunManifest = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
            digests.push(m.files);
        }
        same &= !digests[0].is_empty() && digests[0] == digests[1];
    }
    verdict(same, "simulate, girsanov and ou-scan artifacts compared by sha256 at 1 and 8 threads".into())
}

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("frame and transform invariants", Duration::from_secs(5), frame_and_transform),
        ("curl inverse, trilinear identities, FFT oracle", Duration::from_secs(30), operators_and_products),
        ("OU transition law", Duration::from_secs(30), ou_transitions),
        ("OU Sobolev growth slopes", Duration::from_secs(120), ou_scan_slopes),
        ("deterministic energy balance", Duration::from_secs(60), energy_balance),
        ("stochastic energy identity", Duration::from_secs(120), stochastic_energy),
        ("law equivalence by reweighting", Duration::from_secs(600), law_equivalence),
        ("finiteness of the Girsanov exponent", Duration::from_secs(300), girsanov_finiteness),
        ("continuous dependence on initial data", Duration::from_secs(120), continuous_dependence),
        ("thread-count determinism", Duration::from_secs(600), thread_determinism),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let v = f();
        let took = start.elapsed();
        let pass = v.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
