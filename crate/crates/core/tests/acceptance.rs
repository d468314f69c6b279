//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria run one at a time behind a shared lock so the reported wall
//! times are not inflated by concurrent tests.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use euler_fv::grid::{BoundaryKind, Grid};
use euler_fv::harness::check::{self, CheckOutcome};
use euler_fv::harness::convergence::convergence_study;
use euler_fv::harness::riemann::{RiemannSolution, State1d};
use euler_fv::harness::{self, parse_config, RunConfig};
use euler_fv::params::{MuMode, SchemeParams};
use euler_fv::thermo::Gamma;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict line and returns whether the criterion passed,
/// including its time budget when one is given.
fn verdict(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, budget: Option<Duration>) -> bool {
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = ok && in_time;
    let time = match budget {
        Some(b) => format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), b.as_secs_f64()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!("criterion {id:>2} {} {name}: {detail} [{time}]", if pass { "PASS" } else { "FAIL" });
    pass
}

fn summarize(outcomes: &[CheckOutcome]) -> (bool, String) {
    let ok = outcomes.iter().all(CheckOutcome::passed);
    let worst = outcomes
        .iter()
        .map(|o| o.worst / o.tol)
        .fold(f64::NEG_INFINITY, f64::max);
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name.as_str()).collect();
    let mut detail = format!("{} checks, worst/tol {:.2e}", outcomes.len(), worst);
    if !failed.is_empty() {
        detail.push_str(&format!(", failing: {}", failed.join("; ")));
    }
    (ok, detail)
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn grids() -> Vec<Grid> {
    let mut out = Vec::new();
    for bc in [BoundaryKind::Periodic, BoundaryKind::Wall] {
        out.push(Grid::new(1, &[16], &[(0.0, 1.0)], bc).unwrap());
        out.push(Grid::new(2, &[8, 8], &[(0.0, 1.0), (0.0, 1.0)], bc).unwrap());
    }
    out
}

fn mu_modes() -> [SchemeParams; 3] {
    let g = Gamma::new(1.4).unwrap();
    [
        SchemeParams::new(g, 1.0, MuMode::default()).unwrap(),
        SchemeParams::new(g, 0.6, MuMode::LaxFriedrichs).unwrap(),
        SchemeParams::new(g, 1.3, MuMode::None).unwrap(),
    ]
}

const SOD_400: &str = "\
dim = 1
cells = 400
bc = wall
ic = sod
t_end = 0.2
cfl = 0.3
alpha = 1.3
diag_every = 1000
";

fn config(text: &str) -> RunConfig {
    parse_config(text).unwrap()
}

#[test]
fn criterion_01_weak_form_equivalence() {
    let _g = serial();
    let start = Instant::now();
    let params = SchemeParams::default();
    let outcomes: Vec<CheckOutcome> = grids()
        .iter()
        .enumerate()
        .map(|(i, g)| check::weak_form_check(g, &params, 1, 100, 100 + i as u64).unwrap())
        .collect();
    let (ok, detail) = summarize(&outcomes);
    let pass = verdict(1, "weak-form equivalence", ok, &detail, start.elapsed(), Some(Duration::from_secs(1)));
    assert!(pass, "{outcomes:#?}");
}

#[test]
fn criterion_02_conservation() {
    let _g = serial();
    let start = Instant::now();
    let runs = [
        "cells = 200\nbc = wall\nic = sod\nt_end = 10\nmax_steps = 1000\ndiag_every = 0\n",
        "cells = 128\nbc = periodic\nic = contact_advection\nt_end = 10\nmax_steps = 1000\ndiag_every = 0\n",
    ];
    let mut worst = 0.0f64;
    let mut steps = Vec::new();
    for text in runs {
        let (s, _) = harness::simulate(&config(text)).unwrap();
        worst = worst.max(s.mass_drift).max(s.energy_drift);
        steps.push(s.steps);
    }
    let ok = worst <= 1e-12 && steps.iter().all(|s| *s == 1000);
    let detail = format!("max relative mass/energy drift {worst:.2e} over {steps:?} steps (tol 1e-12)");
    let pass = verdict(2, "conservation", ok, &detail, start.elapsed(), Some(Duration::from_secs(10)));
    assert!(pass);
}

#[test]
fn criterion_03_balance_identities() {
    let _g = serial();
    let start = Instant::now();
    let mut outcomes = Vec::new();
    for (i, g) in grids().iter().enumerate() {
        for (j, p) in mu_modes().iter().enumerate() {
            outcomes.extend(check::balance_identity_checks(g, p, 50, 300 + 10 * i as u64 + j as u64).unwrap());
        }
    }
    let (ok, detail) = summarize(&outcomes);
    let pass = verdict(3, "semi-discrete balance identities", ok, &detail, start.elapsed(), Some(Duration::from_secs(5)));
    assert!(pass, "{outcomes:#?}");
}

#[test]
fn criterion_04_entropy_sign_ledger() {
    let _g = serial();
    let start = Instant::now();
    let mut outcomes = Vec::new();
    for (i, g) in grids().iter().enumerate() {
        for (j, p) in mu_modes().iter().enumerate() {
            outcomes.extend(check::entropy_sign_checks(g, p, 50, 300 + 10 * i as u64 + j as u64).unwrap());
        }
    }
    let (ok, detail) = summarize(&outcomes);
    let pass = verdict(4, "entropy stability and sign ledger", ok, &detail, start.elapsed(), None);
    assert!(pass, "{outcomes:#?}");
}

/// Violations smaller than this relative to the entropy scale are rounding.
const ROUNDOFF: f64 = 1e-12;

#[test]
fn criterion_05_minimum_entropy_principle() {
    let _g = serial();
    let start = Instant::now();
    let base = config(SOD_400);
    let mut half = base.clone();
    half.cfl = 0.15;
    let (a, _) = harness::simulate(&base).unwrap();
    let (b, _) = harness::simulate(&half).unwrap();
    let scale = a.entropy_min0.abs().max(1.0);
    let violation = |d: f64| (-d).max(0.0);
    let (va, vb) = (violation(a.entropy_min_drift()), violation(b.entropy_min_drift()));
    let ok = a.entropy_min_drift() >= -1e-6
        && b.entropy_min_drift() >= -1e-6
        && vb <= va + ROUNDOFF * scale
        && a.retries == 0
        && b.retries == 0
        && a.t == 0.2
        && b.t == 0.2;
    let detail = format!(
        "min-entropy drift {:.2e} (cfl 0.3, {} steps), {:.2e} (cfl 0.15, {} steps), retries {} and {}",
        a.entropy_min_drift(),
        a.steps,
        b.entropy_min_drift(),
        b.steps,
        a.retries,
        b.retries
    );
    let pass = verdict(5, "minimum entropy principle and positivity", ok, &detail, start.elapsed(), Some(Duration::from_secs(30)));
    assert!(pass);
}

#[test]
fn criterion_06_pressure_identity() {
    let _g = serial();
    let start = Instant::now();
    let o = check::pressure_identity_check(100_000, 6);
    let detail = format!("worst relative defect {:.2e} over {} samples (tol 1e-14)", o.worst, o.samples);
    let pass = verdict(6, "pressure flux identity", o.passed(), &detail, start.elapsed(), Some(Duration::from_secs(1)));
    assert!(pass);
}

#[test]
fn criterion_07_convergence_to_smooth_solutions() {
    let _g = serial();
    let start = Instant::now();
    let contact = config(
        "cells = 64\nic = contact_advection\nt_end = 1\nalpha = 1.3\nmu_mode = power\nmu_c = 1\nmu_beta = 0.5\nladder = 64, 128, 256\n",
    );
    let vortex = config("dim = 2\ncells = 32\nic = isentropic_vortex\nt_end = 0.1\nalpha = 1.3\nladder = 32, 64\n");
    let ct = convergence_study(&contact).unwrap();
    let vt = convergence_study(&vortex).unwrap();
    let c_err: Vec<f64> = ct.resolutions.iter().map(|r| r.errors.rho).collect();
    let c_eoc: Vec<f64> = ct.rows.iter().map(|r| r.eoc[0]).collect();
    let v_err: Vec<f64> = vt.resolutions.iter().map(|r| r.errors.rho).collect();
    let ok = c_err.windows(2).all(|w| w[1] < w[0])
        && c_eoc.iter().all(|e| (0.4..=1.1).contains(e))
        && v_err.windows(2).all(|w| w[1] < w[0]);
    let detail = format!("contact L1(rho) {} eoc {c_eoc:.3?}; vortex L1(rho) {}", sci(&c_err), sci(&v_err));
    let pass = verdict(7, "convergence to smooth solutions", ok, &detail, start.elapsed(), Some(Duration::from_secs(120)));
    assert!(pass);
}

#[test]
fn criterion_08_weak_bv_boundedness() {
    let _g = serial();
    let start = Instant::now();
    let mut cfg = config(SOD_400);
    cfg.ladder = vec![100, 200, 400];
    let table = convergence_study(&cfg).unwrap();
    let bv: Vec<[f64; 3]> = table.resolutions.iter().map(|r| r.weak_bv.as_array()).collect();
    let ratios: Vec<[f64; 3]> = bv.windows(2).map(|w| std::array::from_fn(|i| w[1][i] / w[0][i])).collect();
    let ok = ratios.iter().flatten().all(|r| (0.5..=2.0).contains(r));
    let bv_text: Vec<String> = bv.iter().map(|b| sci(b)).collect();
    let detail = format!("B at h=1/100,1/200,1/400 {}; successive ratios {ratios:.3?}", bv_text.join(" "));
    let pass = verdict(8, "weak BV boundedness", ok, &detail, start.elapsed(), None);
    assert!(pass);
}

/// Star pressure by bisection alone on the textbook pressure function.
fn bisection_star_pressure(l: State1d, r: State1d, g: f64) -> f64 {
    let side = |p: f64, s: State1d| {
        if p > s.p {
            let a = 2.0 / ((g + 1.0) * s.rho);
            let b = (g - 1.0) / (g + 1.0) * s.p;
            (p - s.p) * (a / (p + b)).sqrt()
        } else {
            let c = (g * s.p / s.rho).sqrt();
            2.0 * c / (g - 1.0) * ((p / s.p).powf((g - 1.0) / (2.0 * g)) - 1.0)
        }
    };
    let f = |p: f64| side(p, l) + side(p, r) + r.u - l.u;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_09_riemann_oracle() {
    let _g = serial();
    let start = Instant::now();
    let l = State1d { rho: 1.0, u: 0.0, p: 1.0 };
    let r = State1d { rho: 0.125, u: 0.0, p: 0.1 };
    let oracle = bisection_star_pressure(l, r, 1.4);
    let sol = RiemannSolution::solve(l, r, 1.4).unwrap();
    let diff = (sol.p_star - oracle).abs();
    let s = State1d { rho: 0.8, u: -0.3, p: 1.7 };
    let flat = RiemannSolution::solve(s, s, 1.4).unwrap();
    let constant = (-40..=40).all(|i| flat.sample(0.1 * f64::from(i)) == s);
    let ok = diff <= 1e-10 && (oracle - 0.30313).abs() < 5e-6 && constant;
    let detail = format!("p* {:.12} vs bisection {oracle:.12} (diff {diff:.1e}); equal states constant: {constant}", sol.p_star);
    let pass = verdict(9, "Riemann oracle self-check", ok, &detail, start.elapsed(), None);
    assert!(pass);
}

#[test]
fn criterion_10_determinism() {
    let _g = serial();
    let start = Instant::now();
    let mut files = Vec::new();
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (threads, dir) in [1, 4].into_iter().zip(&dirs) {
        let mut cfg = config(SOD_400);
        cfg.threads = threads;
        cfg.out_dir = dir.path().to_path_buf();
        harness::run(&cfg).unwrap();
        files.push(std::fs::read(dir.path().join("diagnostics.csv")).unwrap());
    }
    let rows = files[0].iter().filter(|b| **b == b'\n').count();
    let ok = files[0] == files[1] && rows > 2;
    let detail = format!("diagnostics.csv with 1 and 4 threads identical: {} ({rows} lines)", files[0] == files[1]);
    let pass = verdict(10, "determinism", ok, &detail, start.elapsed(), None);
    assert!(pass);
}
