//! Discrete balance identities and a-priori bounds as executable checks.
//!
//! Every identity is instantaneous: time derivatives of composite quantities
//! are obtained by the chain rule from [`scheme::rhs`], so the defects
//! measure only roundoff. Face sums run over interior faces; wall faces
//! contribute the explicit terms produced by the mirror ghost.

use crate::flux::{self, FaceTrace, SideState};
use crate::grid::Grid;
use crate::params::SchemeParams;
use crate::scheme::{self, Defect, Residual, SchemeError, TermSum};
use crate::thermo::{ChiSpec, ConservedField, Gamma, ThermoError};
use crate::vec3::{self, Vec3};

/// Per-cell time derivatives of derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRuleProbe {
    pub d_vel: Vec<Vec3>,
    /// `d(½ρ|u|²)/dt`.
    pub d_kin: Vec<f64>,
    /// `d(ρe)/dt`.
    pub d_inte: Vec<f64>,
    pub d_temp: Vec<f64>,
    pub d_entr: Vec<f64>,
}

impl ChainRuleProbe {
    pub fn new(sides: &[SideState], res: &Residual, gamma: Gamma) -> Self {
        let cv = gamma.cv();
        let n = sides.len();
        let mut probe = ChainRuleProbe {
            d_vel: Vec::with_capacity(n),
            d_kin: Vec::with_capacity(n),
            d_inte: Vec::with_capacity(n),
            d_temp: Vec::with_capacity(n),
            d_entr: Vec::with_capacity(n),
        };
        for (k, s) in sides.iter().enumerate() {
            let (dr, dm, de) = (res.d_rho[k], res.d_mom[k], res.d_ener[k]);
            let d_vel = vec3::scale(1.0 / s.rho, vec3::sub(dm, vec3::scale(dr, s.vel)));
            let d_kin = vec3::dot(s.vel, dm) - 0.5 * vec3::norm2(s.vel) * dr;
            let d_inte = de - d_kin;
            let theta = s.temp();
            let d_temp = (d_inte - theta * cv * dr) / (cv * s.rho);
            let d_entr = cv * d_temp / theta - dr / s.rho;
            probe.d_vel.push(d_vel);
            probe.d_kin.push(d_kin);
            probe.d_inte.push(d_inte);
            probe.d_temp.push(d_temp);
            probe.d_entr.push(d_entr);
        }
        probe
    }

    /// `d(ρ χ(s))/dt = χ(s) dρ/dt + ρ χ'(s) ds/dt` in cell `k`.
    pub fn renormalized_entropy_rate(&self, k: usize, side: &SideState, d_rho: f64, chi: &ChiSpec, gamma: Gamma) -> f64 {
        let s = cell_entropy(side, gamma);
        chi.value(s) * d_rho + side.rho * chi.deriv(s) * self.d_entr[k]
    }
}

#[inline]
fn cell_entropy(side: &SideState, gamma: Gamma) -> f64 {
    gamma.cv() * side.temp().ln() - side.rho.ln()
}

/// Convex density renormalizations `b(ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityRenorm {
    RhoLogRho,
    /// `b(ρ) = ρ`; the renormalized balance collapses to the continuity equation.
    Linear,
    /// `b(ρ) = max(ρ̲ - ρ, 0)`, smoothed over `[ρ̲ - w, ρ̲ + w]`.
    NegativePart { floor: f64, smoothing: f64 },
}

impl DensityRenorm {
    pub fn value(&self, rho: f64) -> f64 {
        match *self {
            DensityRenorm::RhoLogRho => rho * rho.ln(),
            DensityRenorm::Linear => rho,
            DensityRenorm::NegativePart { floor, smoothing } => {
                -crate::thermo::smooth_min(rho - floor, 0.0, smoothing).0
            }
        }
    }

    pub fn deriv(&self, rho: f64) -> f64 {
        match *self {
            DensityRenorm::RhoLogRho => rho.ln() + 1.0,
            DensityRenorm::Linear => 1.0,
            DensityRenorm::NegativePart { floor, smoothing } => {
                -crate::thermo::smooth_min(rho - floor, 0.0, smoothing).1
            }
        }
    }
}

/// Shared per-state data for the identity evaluators.
struct Context {
    sides: Vec<SideState>,
    res: Residual,
    probe: ChainRuleProbe,
}

fn context(cons: &ConservedField, grid: &Grid, params: &SchemeParams, phi: &[f64]) -> Result<Context, SchemeError> {
    if phi.len() != cons.len() {
        return Err(SchemeError::Shape { what: "test function", expected: cons.len(), got: phi.len() });
    }
    let res = scheme::rhs(cons, grid, params)?;
    let mut sides = Vec::new();
    scheme::side_states(cons, params, &mut sides)?;
    let probe = ChainRuleProbe::new(&sides, &res, params.gamma);
    Ok(Context { sides, res, probe })
}

/// Interior face as seen by the identities.
struct FaceView {
    a: SideState,
    b: SideState,
    n: Vec3,
    un: f64,
    mu: f64,
    pen: f64,
    phi: FaceTrace<f64>,
    /// Whether the in side is upwind (`ū·n ≥ 0`).
    in_is_up: bool,
}

impl FaceView {
    fn ju(&self) -> Vec3 {
        vec3::sub(self.b.vel, self.a.vel)
    }

    fn trace(&self, f: impl Fn(&SideState) -> f64) -> FaceTrace<f64> {
        FaceTrace::new(f(&self.a), f(&self.b))
    }

    /// `(up, down)` values of a per-side quantity.
    fn updown(&self, f: impl Fn(&SideState) -> f64) -> (f64, f64) {
        if self.in_is_up {
            (f(&self.a), f(&self.b))
        } else {
            (f(&self.b), f(&self.a))
        }
    }

    fn phi_updown(&self) -> (f64, f64) {
        if self.in_is_up {
            (self.phi.v_in, self.phi.v_out)
        } else {
            (self.phi.v_out, self.phi.v_in)
        }
    }
}

fn interior_views<'a>(
    grid: &'a Grid,
    params: &'a SchemeParams,
    sides: &'a [SideState],
    phi: &'a [f64],
) -> impl Iterator<Item = FaceView> + 'a {
    grid.interior_faces().iter().map(move |face| {
        let (a, b) = scheme::face_sides(face, sides);
        let n = face.normal();
        let coeffs = scheme::face_coeffs(grid, params, &a, &b, n);
        let un = vec3::dot(vec3::avg(a.vel, b.vel), n);
        let out = face.out_cell().expect("interior face has an out cell");
        FaceView {
            a,
            b,
            n,
            un,
            mu: coeffs.mu,
            pen: coeffs.pen,
            phi: FaceTrace::new(phi[face.in_cell], phi[out]),
            in_is_up: un >= 0.0,
        }
    })
}

/// Wall face data: the interior cell, its normal velocity, and the wall
/// friction coefficient `ζ = 2(μρ + h^(α-1))`.
struct WallView {
    cell: usize,
    side: SideState,
    un: f64,
    zeta: f64,
}

fn wall_views<'a>(grid: &'a Grid, params: &'a SchemeParams, sides: &'a [SideState]) -> impl Iterator<Item = WallView> + 'a {
    grid.boundary_faces().iter().map(move |face| {
        let (a, b) = scheme::face_sides(face, sides);
        let n = face.normal();
        let coeffs = scheme::face_coeffs(grid, params, &a, &b, n);
        WallView {
            cell: face.in_cell,
            side: a,
            un: vec3::dot(a.vel, n),
            zeta: 2.0 * (coeffs.mu * a.rho + coeffs.pen),
        }
    })
}

/// Kinetic energy balance: `d/dt Σ|K| ½ρ|u|² Φ` against its face form.
pub fn kinetic_balance_defect(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    phi: &[f64],
) -> Result<Defect, SchemeError> {
    let ctx = context(cons, grid, params, phi)?;
    let (vol, area) = (grid.cell_volume(), grid.face_area());
    let mut sum = TermSum::default();
    for k in 0..cons.len() {
        sum.add(vol * ctx.probe.d_kin[k] * phi[k]);
    }
    let kin = |s: &SideState| 0.5 * s.rho * vec3::norm2(s.vel);
    for f in interior_views(grid, params, &ctx.sides, phi) {
        let ju = f.ju();
        let j_uphi = vec3::sub(vec3::scale(f.phi.v_out, f.b.vel), vec3::scale(f.phi.v_in, f.a.vel));
        let jm = vec3::sub(f.b.mom, f.a.mom);
        let (_, phi_down) = f.phi_updown();
        let (rho_up, _) = f.updown(|s| s.rho);
        let terms = [
            flux::upwind(f.trace(kin), f.un) * f.phi.jump(),
            -f.pen * vec3::dot(ju, j_uphi),
            f.trace(|s| s.pres).avg() * vec3::dot(f.n, j_uphi),
            -f.mu * vec3::dot(jm, j_uphi),
            f.mu * f.trace(|s| s.rho).jump() * FaceTrace::new(
                0.5 * vec3::norm2(f.a.vel) * f.phi.v_in,
                0.5 * vec3::norm2(f.b.vel) * f.phi.v_out,
            )
            .jump(),
            -0.5 * phi_down * rho_up * f.un.abs() * vec3::norm2(ju),
        ];
        for t in terms {
            sum.add(-area * t);
        }
    }
    for w in wall_views(grid, params, &ctx.sides) {
        sum.add(area * phi[w.cell] * (w.side.pres * w.un + w.zeta * w.un * w.un));
    }
    Ok(sum.defect())
}

/// Internal energy balance: `d/dt Σ|K| ρe Φ` against its face form.
pub fn internal_balance_defect(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    phi: &[f64],
) -> Result<Defect, SchemeError> {
    let ctx = context(cons, grid, params, phi)?;
    let (vol, area) = (grid.cell_volume(), grid.face_area());
    let cv = params.gamma.cv();
    let mut sum = TermSum::default();
    for k in 0..cons.len() {
        sum.add(vol * ctx.probe.d_inte[k] * phi[k]);
    }
    for f in interior_views(grid, params, &ctx.sides, phi) {
        let ju = f.ju();
        let ju2 = vec3::norm2(ju);
        let re = f.trace(|s| cv * s.pres);
        let (_, phi_down) = f.phi_updown();
        let (rho_up, _) = f.updown(|s| s.rho);
        let p_phi = FaceTrace::new(f.a.pres * f.phi.v_in, f.b.pres * f.phi.v_out);
        let terms = [
            flux::scalar_flux(re, f.un, f.mu) * f.phi.jump(),
            f.pen * ju2 * f.phi.avg(),
            0.5 * phi_down * rho_up * f.un.abs() * ju2,
            f.mu * ju2 * 0.5 * (f.a.rho * f.phi.v_out + f.b.rho * f.phi.v_in),
            -p_phi.avg() * vec3::dot(ju, f.n),
        ];
        for t in terms {
            sum.add(-area * t);
        }
    }
    for w in wall_views(grid, params, &ctx.sides) {
        sum.add(-area * phi[w.cell] * (w.side.pres * w.un + w.zeta * w.un * w.un));
    }
    Ok(sum.defect())
}

/// Renormalized continuity: `d/dt Σ|K| b(ρ) Φ` against its face form.
pub fn renormalized_continuity_defect(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    b: DensityRenorm,
    phi: &[f64],
) -> Result<Defect, SchemeError> {
    let ctx = context(cons, grid, params, phi)?;
    let (vol, area) = (grid.cell_volume(), grid.face_area());
    let mut sum = TermSum::default();
    for k in 0..cons.len() {
        sum.add(vol * b.deriv(ctx.sides[k].rho) * ctx.res.d_rho[k] * phi[k]);
    }
    for f in interior_views(grid, params, &ctx.sides, phi) {
        let bt = f.trace(|s| b.value(s.rho));
        let rest = FaceTrace::new(
            (b.value(f.a.rho) - b.deriv(f.a.rho) * f.a.rho) * f.phi.v_in,
            (b.value(f.b.rho) - b.deriv(f.b.rho) * f.b.rho) * f.phi.v_out,
        );
        let bphi = FaceTrace::new(b.deriv(f.a.rho) * f.phi.v_in, b.deriv(f.b.rho) * f.phi.v_out);
        let (rho_up, rho_down) = f.updown(|s| s.rho);
        let (b_up, b_down) = (b.value(rho_up), b.value(rho_down));
        let (_, phi_down) = f.phi_updown();
        let terms = [
            flux::upwind(bt, f.un) * f.phi.jump(),
            -f.un * rest.jump(),
            -f.mu * f.trace(|s| s.rho).jump() * bphi.jump(),
            -phi_down * (b_up - b_down - b.deriv(rho_down) * (rho_up - rho_down)) * f.un.abs(),
        ];
        for t in terms {
            sum.add(-area * t);
        }
    }
    Ok(sum.defect())
}

/// Names of the entropy production terms, in report order.
pub const PRODUCTION_TERMS: [&str; 8] = [
    "penalty",
    "upwind_velocity",
    "mu_velocity",
    "density_convexity",
    "temperature_concavity",
    "entropy_renormalization",
    "mu_monotonicity",
    "wall_dissipation",
];

/// Entropy balance `d/dt Σ|K| ρχ(s) Φ = flux + Σ production`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBalance {
    /// Chain-rule rate `Σ|K| d(ρχ(s))/dt Φ`.
    pub rate: f64,
    /// Numerical entropy flux tested against `[[Φ]]`; vanishes for constant `Φ`.
    pub flux: f64,
    /// Production terms in the order of [`PRODUCTION_TERMS`].
    pub production: [f64; 8],
    pub defect: Defect,
}

impl EntropyBalance {
    pub fn named(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        PRODUCTION_TERMS.iter().copied().zip(self.production.iter().copied())
    }

    /// Terms below `-tol`, by name.
    pub fn negative_terms(&self, tol: f64) -> Vec<&'static str> {
        self.named().filter(|(_, v)| *v < -tol).map(|(n, _)| n).collect()
    }
}

pub fn entropy_balance_report(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    chi: &ChiSpec,
    phi: &[f64],
) -> Result<EntropyBalance, SchemeError> {
    let ctx = context(cons, grid, params, phi)?;
    let gamma = params.gamma;
    let (cv, gm) = (gamma.cv(), gamma.value());
    let (vol, area) = (grid.cell_volume(), grid.face_area());

    let mut lhs = TermSum::default();
    for k in 0..cons.len() {
        let side = &ctx.sides[k];
        lhs.add(vol * ctx.probe.renormalized_entropy_rate(k, side, ctx.res.d_rho[k], chi, gamma) * phi[k]);
    }

    let s_of = |s: &SideState| cell_entropy(s, gamma);
    let x_of = |s: &SideState| chi.value(s_of(s));
    let xp_of = |s: &SideState| chi.deriv(s_of(s));
    let g_rho = |s: &SideState| x_of(s) - gm * cv * xp_of(s);
    let g_p = |s: &SideState| s.rho * xp_of(s) * cv / s.pres;

    let mut flux_sum = TermSum::default();
    let mut prod = [TermSum::default(); 8];
    for f in interior_views(grid, params, &ctx.sides, phi) {
        let ju2 = vec3::norm2(f.ju());
        let aun = f.un.abs();
        let jphi = f.phi.jump();
        let q = FaceTrace::new(xp_of(&f.a) * f.phi.v_in / f.a.temp(), xp_of(&f.b) * f.phi.v_out / f.b.temp());
        let q_down = if f.in_is_up { q.v_out } else { q.v_in };
        let (_, phi_down) = f.phi_updown();
        let xphi_down = if f.in_is_up { xp_of(&f.b) * f.phi.v_out } else { xp_of(&f.a) * f.phi.v_in };
        let (rho_up, rho_down) = f.updown(|s| s.rho);
        let (th_up, th_down) = f.updown(|s| s.temp());
        let (s_up, s_down) = f.updown(s_of);
        let (x_up, x_down) = f.updown(x_of);
        let b = |r: f64| r * r.ln();
        let jrho = f.trace(|s| s.rho).jump();
        let jp = f.trace(|s| s.pres).jump();
        let grho = f.trace(g_rho);
        let gp = f.trace(g_p);

        flux_sum.add(area * flux::upwind(f.trace(|s| s.rho * x_of(s)), f.un) * jphi);
        flux_sum.add(-area * f.mu * jphi * (grho.avg() * jrho + gp.avg() * jp));

        let terms = [
            f.pen * ju2 * q.avg(),
            0.5 * q_down * rho_up * aun * ju2,
            f.mu * ju2 * 0.5 * (f.a.rho * q.v_out + f.b.rho * q.v_in),
            xphi_down * (b(rho_up) - b(rho_down) - (rho_down.ln() + 1.0) * (rho_up - rho_down)) * aun,
            -cv * xphi_down * rho_up * ((th_up.ln() - th_down.ln()) - (th_up - th_down) / th_down) * aun,
            -phi_down * rho_up * ((x_up - x_down) - chi.deriv(s_down) * (s_up - s_down)) * aun,
            -f.mu * f.phi.avg() * (grho.jump() * jrho + gp.jump() * jp),
        ];
        for (acc, t) in prod.iter_mut().zip(terms) {
            acc.add(area * t);
        }
    }
    for w in wall_views(grid, params, &ctx.sides) {
        let xp = xp_of(&w.side);
        prod[7].add(area * phi[w.cell] * xp * w.zeta * w.un * w.un / w.side.temp());
    }

    let production: [f64; 8] = std::array::from_fn(|i| prod[i].total);
    let total_prod: f64 = production.iter().sum();
    let scale = lhs.scale + flux_sum.scale + prod.iter().map(|p| p.scale).sum::<f64>();
    Ok(EntropyBalance {
        rate: lhs.total,
        flux: flux_sum.total,
        production,
        defect: Defect { defect: lhs.total - flux_sum.total - total_prod, scale },
    })
}

/// Defect between the sum of the kinetic and internal balances and the
/// energy weak form tested with the same `Φ`.
pub fn energy_split_defect(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    phi: &[f64],
) -> Result<Defect, SchemeError> {
    let k1 = kinetic_balance_defect(cons, grid, params, phi)?;
    let k2 = internal_balance_defect(cons, grid, params, phi)?;
    let weak = scheme::weak_form_residual(
        cons,
        grid,
        params,
        scheme::WeakEquation::Energy,
        &scheme::TestFunction::Scalar(phi.to_vec()),
    )?;
    Ok(Defect {
        defect: k1.defect + k2.defect - weak.defect,
        scale: k1.scale + k2.scale + weak.scale,
    })
}

/// Instantaneous weak-BV integrands `(h^(α-1) Σ|σ||[[u]]|², Σ|σ|λ[[ρ]]², Σ|σ|λ[[θ]]²)`
/// with `λ = |ū·n| + μ`, over interior faces.
pub fn weak_bv_integrand(sides: &[SideState], grid: &Grid, params: &SchemeParams) -> [f64; 3] {
    let area = grid.face_area();
    let pen = grid.h().powf(params.alpha - 1.0);
    let model = scheme::CoeffModel::new(grid, params);
    let mut out = [0.0; 3];
    for face in grid.interior_faces() {
        let (a, b) = scheme::face_sides(face, sides);
        let n = face.normal();
        let mu = model.at(&a, &b, n).mu;
        let lambda = vec3::dot(vec3::avg(a.vel, b.vel), n).abs() + mu;
        let jt = b.temp() - a.temp();
        out[0] += area * pen * vec3::norm2(vec3::sub(b.vel, a.vel));
        out[1] += area * lambda * (b.rho - a.rho).powi(2);
        out[2] += area * lambda * jt * jt;
    }
    out
}

/// Time-integrated weak-BV functionals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakBv {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl WeakBv {
    pub fn as_array(&self) -> [f64; 3] {
        [self.b1, self.b2, self.b3]
    }
}

/// Trapezoidal accumulation of weak-BV integrands sampled in time.
#[derive(Debug, Clone, Default)]
pub struct WeakBvAccumulator {
    last: Option<(f64, [f64; 3])>,
    total: WeakBv,
}

impl WeakBvAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, integrand: [f64; 3]) {
        if let Some((t0, prev)) = self.last {
            let dt = t - t0;
            self.total.b1 += 0.5 * dt * (prev[0] + integrand[0]);
            self.total.b2 += 0.5 * dt * (prev[1] + integrand[1]);
            self.total.b3 += 0.5 * dt * (prev[2] + integrand[2]);
        }
        self.last = Some((t, integrand));
    }

    pub fn value(&self) -> WeakBv {
        self.total
    }
}

/// Weak-BV functionals of a sampled trajectory `(t, integrand)`.
pub fn weak_bv_functionals(samples: &[(f64, [f64; 3])]) -> WeakBv {
    let mut acc = WeakBvAccumulator::new();
    for &(t, v) in samples {
        acc.push(t, v);
    }
    acc.value()
}

/// Totals and entropy minimum of one state, plus the monitored rates.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub t: f64,
    pub mass_total: f64,
    pub energy_total: f64,
    /// `Σ|K| ρχ(s)`.
    pub entropy_total: f64,
    /// `min_K s_K`.
    pub entropy_min: f64,
    /// `d/dt Σ|K| ρχ(s)` from the chain rule.
    pub entropy_rate: f64,
    pub production_terms: Vec<(&'static str, f64)>,
    pub weak_bv: WeakBv,
}

/// Totals and the exact (unsmoothed) minimum entropy of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    pub entropy_min: f64,
}

pub fn totals(cons: &ConservedField, grid: &Grid, params: &SchemeParams, chi: &ChiSpec) -> Result<Totals, ThermoError> {
    let vol = grid.cell_volume();
    let mut t = Totals { mass: 0.0, energy: 0.0, entropy: 0.0, entropy_min: f64::INFINITY };
    for k in 0..cons.len() {
        let p = cons.primitive(k, params.gamma, params.floors)?;
        let s = p.entropy(params.gamma);
        t.mass += vol * p.rho;
        t.energy += vol * cons.ener[k];
        t.entropy += vol * p.rho * chi.value(s);
        t.entropy_min = t.entropy_min.min(s);
    }
    Ok(t)
}

/// Full report with `Φ ≡ 1`; `weak_bv` carries the functionals accumulated so far.
pub fn balance_report(
    t: f64,
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    chi: &ChiSpec,
    weak_bv: WeakBv,
) -> Result<BalanceReport, SchemeError> {
    let tot = totals(cons, grid, params, chi)?;
    let ones = vec![1.0; cons.len()];
    let eb = entropy_balance_report(cons, grid, params, chi, &ones)?;
    Ok(BalanceReport {
        t,
        mass_total: tot.mass,
        energy_total: tot.energy,
        entropy_total: tot.entropy,
        entropy_min: tot.entropy_min,
        entropy_rate: eb.rate,
        production_terms: eb.named().collect(),
        weak_bv,
    })
}

/// One monitored sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub entropy_min: f64,
}

/// Relative mass and energy drifts and the signed minimum-entropy violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub mass_rel: f64,
    pub energy_rel: f64,
    /// `min_t min_K s_K(t) - min_K s_K(0)`; negative values are violations.
    pub entropy_min_drift: f64,
}

pub fn conservation_and_minimum(samples: &[MonitorSample]) -> Drift {
    let Some(first) = samples.first() else {
        return Drift { mass_rel: 0.0, energy_rel: 0.0, entropy_min_drift: 0.0 };
    };
    let mut d = Drift { mass_rel: 0.0, energy_rel: 0.0, entropy_min_drift: 0.0 };
    let mut smin = first.entropy_min;
    for s in samples {
        d.mass_rel = d.mass_rel.max(((s.mass - first.mass) / first.mass).abs());
        d.energy_rel = d.energy_rel.max(((s.energy - first.energy) / first.energy).abs());
        smin = smin.min(s.entropy_min);
    }
    d.entropy_min_drift = smin - first.entropy_min;
    d
}

/// Largest relative shortfall of `p_K` below `exp((γ-1)s₀) ρ_K^γ`; at most 0
/// when every cell keeps entropy at least `s₀`.
pub fn pressure_bound_violation(cons: &ConservedField, params: &SchemeParams, s0: f64) -> Result<f64, ThermoError> {
    let g = params.gamma.value();
    let mut worst = f64::NEG_INFINITY;
    for k in 0..cons.len() {
        let p = cons.primitive(k, params.gamma, params.floors)?;
        let bound = ((g - 1.0) * s0).exp() * p.rho.powf(g);
        worst = worst.max((bound - p.pres) / bound);
    }
    Ok(worst)
}
