//! Identity and property suite on randomized admissible states.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::initial::random_primitives;
use super::{ConfigError, HarnessError};
use crate::diagnostics::{self, DensityRenorm};
use crate::flux::{self, FaceTrace};
use crate::grid::{BoundaryKind, Grid};
use crate::params::SchemeParams;
use crate::scheme::{self, Defect, SchemeError, TestFunction, WeakEquation};
use crate::thermo::{ChiSpec, ConservedField};
use crate::vec3::Vec3;

/// Worst observed value of a check against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub samples: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<44} worst {:>10.3e}  tol {:.0e}  samples {}", self.name, self.worst, self.tol, self.samples)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckLedger {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckLedger {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed()).count()
    }
}

impl fmt::Display for CheckLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let n = self.outcomes.len();
        write!(f, "{} of {n} checks passed", n - self.failures())
    }
}

/// Running maximum of a measured quantity.
struct Worst {
    name: String,
    worst: f64,
    tol: f64,
    samples: usize,
}

impl Worst {
    fn new(name: impl Into<String>, tol: f64) -> Self {
        Worst { name: name.into(), worst: f64::NEG_INFINITY, tol, samples: 0 }
    }

    fn push(&mut self, x: f64) {
        // NaN must fail the check.
        self.worst = if x.is_nan() { f64::INFINITY } else { self.worst.max(x) };
        self.samples += 1;
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome { name: self.name, worst: self.worst, tol: self.tol, samples: self.samples }
    }
}

/// Admissible state with `ρ, p ∈ [0.5, 2]` and velocity components in `[-1, 1]`.
pub fn random_state(grid: &Grid, params: &SchemeParams, rng: &mut ChaCha8Rng) -> ConservedField {
    let prims = random_primitives(grid.num_cells(), grid.dim(), rng.gen(), (0.5, 2.0), (0.5, 2.0), 1.0);
    ConservedField::from_primitives(&prims, params.gamma)
}

fn random_phi(n: usize, lo: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..1.0)).collect()
}

/// Weak-form defect of the three conservation laws for `tests` random piecewise-constant test functions.
pub fn weak_form_check(
    grid: &Grid,
    params: &SchemeParams,
    states: usize,
    tests: usize,
    seed: u64,
) -> Result<CheckOutcome, SchemeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worst::new(format!("weak form ({}, {}D)", grid.bc(), grid.dim()), 1e-12);
    let n = grid.num_cells();
    for _ in 0..states {
        let cons = random_state(grid, params, &mut rng);
        for _ in 0..tests {
            let phi = random_phi(n, -1.0, &mut rng);
            let vphi: Vec<Vec3> = (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
            for (eq, tf) in [
                (WeakEquation::Continuity, TestFunction::Scalar(phi.clone())),
                (WeakEquation::Momentum, TestFunction::Vector(vphi)),
                (WeakEquation::Energy, TestFunction::Scalar(phi)),
            ] {
                w.push(scheme::weak_form_residual(&cons, grid, params, eq, &tf)?.relative());
            }
        }
    }
    Ok(w.finish())
}

/// Renormalization used for the entropy identity checks.
pub fn identity_chi() -> ChiSpec {
    ChiSpec::cap(0.1).and_then(|c| c.smoothed(1e-3)).expect("valid renormalization")
}

/// Kinetic, internal, renormalized-continuity, entropy and energy-split defects
/// for `Φ ≡ 1` and one random `Φ ∈ [0, 1)` per state.
pub fn balance_identity_checks(
    grid: &Grid,
    params: &SchemeParams,
    states: usize,
    seed: u64,
) -> Result<Vec<CheckOutcome>, SchemeError> {
    let tag = format!("({}, {}D)", grid.bc(), grid.dim());
    let tol = 1e-10;
    let mut kin = Worst::new(format!("kinetic energy balance {tag}"), tol);
    let mut int = Worst::new(format!("internal energy balance {tag}"), tol);
    let mut ren = Worst::new(format!("renormalized continuity rho log rho {tag}"), tol);
    let mut ent = Worst::new(format!("entropy balance, capped chi {tag}"), tol);
    let mut kinked = Worst::new(format!("entropy balance, active cap {tag}"), tol);
    let mut split = Worst::new(format!("kinetic + internal = total energy {tag}"), tol);
    let chi = identity_chi();
    let active = ChiSpec::cap(1.0).and_then(|c| c.smoothed(0.2)).expect("valid renormalization");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.num_cells();
    for _ in 0..states {
        let cons = random_state(grid, params, &mut rng);
        for phi in [vec![1.0; n], random_phi(n, 0.0, &mut rng)] {
            kin.push(diagnostics::kinetic_balance_defect(&cons, grid, params, &phi)?.relative());
            int.push(diagnostics::internal_balance_defect(&cons, grid, params, &phi)?.relative());
            let b = DensityRenorm::RhoLogRho;
            ren.push(diagnostics::renormalized_continuity_defect(&cons, grid, params, b, &phi)?.relative());
            ent.push(diagnostics::entropy_balance_report(&cons, grid, params, &chi, &phi)?.defect.relative());
            kinked.push(diagnostics::entropy_balance_report(&cons, grid, params, &active, &phi)?.defect.relative());
            split.push(diagnostics::energy_split_defect(&cons, grid, params, &phi)?.relative());
        }
    }
    Ok([kin, int, ren, ent, kinked, split].into_iter().map(Worst::finish).collect())
}

/// Production terms and the entropy rate with `Φ ≡ 1`, as `-value / scale`
/// (positive numbers are violations).
pub fn entropy_sign_checks(
    grid: &Grid,
    params: &SchemeParams,
    states: usize,
    seed: u64,
) -> Result<Vec<CheckOutcome>, SchemeError> {
    let tag = format!("({}, {}D)", grid.bc(), grid.dim());
    let mut prod = Worst::new(format!("production terms nonnegative {tag}"), 1e-12);
    let mut rate = Worst::new(format!("entropy rate nonnegative {tag}"), 1e-10);
    let chi = identity_chi();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ones = vec![1.0; grid.num_cells()];
    for _ in 0..states {
        let cons = random_state(grid, params, &mut rng);
        let eb = diagnostics::entropy_balance_report(&cons, grid, params, &chi, &ones)?;
        let scale = eb.defect.scale.max(f64::MIN_POSITIVE);
        for (_, v) in eb.named() {
            prod.push(-v / scale);
        }
        rate.push(-eb.rate / scale);
    }
    Ok(vec![prod.finish(), rate.finish()])
}

/// Total mass and energy rates relative to the sum of cell rate magnitudes.
pub fn conservation_check(
    grid: &Grid,
    params: &SchemeParams,
    states: usize,
    seed: u64,
) -> Result<CheckOutcome, SchemeError> {
    let mut w = Worst::new(format!("mass and energy rates vanish ({}, {}D)", grid.bc(), grid.dim()), 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = grid.cell_volume();
    for _ in 0..states {
        let cons = random_state(grid, params, &mut rng);
        let r = scheme::rhs(&cons, grid, params)?;
        let rel = |v: &[f64], total: f64| total.abs() / (vol * v.iter().map(|x| x.abs()).sum::<f64>()).max(f64::MIN_POSITIVE);
        w.push(rel(&r.d_rho, r.mass_rate(grid)));
        w.push(rel(&r.d_ener, r.energy_rate(grid)));
    }
    Ok(w.finish())
}

/// Two-sum and combined forms of the energy pressure term on one face,
/// `p̄[[Φ u·n]] - (pΦ)‾[[u·n]]` against `(p̄ ū·n - ¼[[p]][[u·n]])[[Φ]]`.
pub fn pressure_identity_defect(p: FaceTrace<f64>, un: FaceTrace<f64>, phi: FaceTrace<f64>) -> Defect {
    let a = p.avg() * FaceTrace::new(phi.v_in * un.v_in, phi.v_out * un.v_out).jump();
    let b = FaceTrace::new(p.v_in * phi.v_in, p.v_out * phi.v_out).avg() * un.jump();
    let c = flux::energy_pressure_flux(p, un) * phi.jump();
    let scale = p.avg().abs() * (phi.v_in * un.v_in).abs().max((phi.v_out * un.v_out).abs())
        + (p.v_in * phi.v_in).abs().max((p.v_out * phi.v_out).abs()) * un.v_in.abs().max(un.v_out.abs());
    Defect { defect: a - b - c, scale }
}

pub fn pressure_identity_check(samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worst::new("pressure flux combined form", 1e-14);
    for _ in 0..samples {
        let mut tr = |lo: f64, hi: f64| FaceTrace::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        let p = tr(0.1, 10.0);
        let un = tr(-3.0, 3.0);
        let phi = tr(-1.0, 1.0);
        w.push(pressure_identity_defect(p, un, phi).relative());
    }
    w.finish()
}

/// `log Z ≤ Z - 1` for `Z = θ_out / θ_in`; reports the largest `log Z - (Z - 1)`.
pub fn log_inequality_check(samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worst::new("temperature jump log Z <= Z - 1", 0.0);
    for _ in 0..samples {
        let z: f64 = rng.gen_range(1e-3..10.0) / rng.gen_range(1e-3..10.0);
        w.push(z.ln() - (z - 1.0));
    }
    w.finish()
}

/// Full suite on the grid and scheme parameters of `cfg`, for both boundary kinds.
pub fn check_suite(cfg: &RunConfig, states: usize, seed: u64) -> Result<CheckLedger, HarnessError> {
    let params = cfg.scheme_params()?;
    let mut ledger = CheckLedger::default();
    for (i, bc) in [BoundaryKind::Periodic, BoundaryKind::Wall].into_iter().enumerate() {
        let grid = Grid::new(cfg.dim, &cfg.cells, &cfg.extents, bc).map_err(ConfigError::from)?;
        let s = seed.wrapping_add(1000 * i as u64);
        ledger.outcomes.push(weak_form_check(&grid, &params, states.min(4), 25, s)?);
        ledger.outcomes.extend(balance_identity_checks(&grid, &params, states, s + 1)?);
        ledger.outcomes.extend(entropy_sign_checks(&grid, &params, states, s + 2)?);
        ledger.outcomes.push(conservation_check(&grid, &params, states, s + 3)?);
    }
    ledger.outcomes.push(pressure_identity_check(100_000, seed));
    ledger.outcomes.push(log_inequality_check(100_000, seed));
    Ok(ledger)
}
