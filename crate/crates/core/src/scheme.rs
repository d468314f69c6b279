//! Semi-discrete right-hand side in cellwise form, and an independent
//! evaluator of the weak formulation used to pin sign conventions.
//!
//! Every face flux is computed once into a face array; each cell then
//! gathers its faces in the fixed order of the grid incidence lists. The
//! result does not depend on how the face and cell sweeps are partitioned.

use rayon::prelude::*;

use crate::flux::{self, FaceFlux, FaceTrace, FluxCoeffs, SideState};
use crate::grid::{Face, Grid, Outside};
use crate::params::{MuMode, SchemeParams};
use crate::thermo::{ConservedField, ThermoError};
use crate::vec3::{self, Vec3};

/// Work items below this length run on the calling thread.
pub(crate) const PAR_MIN_LEN: usize = 2048;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("{what} has {got} entries, expected {expected}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Time derivatives of the conservative variables, per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub d_rho: Vec<f64>,
    pub d_mom: Vec<Vec3>,
    pub d_ener: Vec<f64>,
}

impl Residual {
    pub fn zeros(n: usize) -> Self {
        Residual {
            d_rho: vec![0.0; n],
            d_mom: vec![vec3::ZERO; n],
            d_ener: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.d_rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_rho.is_empty()
    }

    /// `Σ_K |K| dρ_K/dt`.
    pub fn mass_rate(&self, grid: &Grid) -> f64 {
        grid.cell_volume() * self.d_rho.iter().sum::<f64>()
    }

    /// `Σ_K |K| dE_K/dt`.
    pub fn energy_rate(&self, grid: &Grid) -> f64 {
        grid.cell_volume() * self.d_ener.iter().sum::<f64>()
    }
}

/// Scratch buffers reused across right-hand-side evaluations.
#[derive(Debug, Default, Clone)]
pub struct RhsWorkspace {
    sides: Vec<SideState>,
    interior: Vec<FaceFlux>,
    boundary: Vec<FaceFlux>,
}

impl RhsWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sides(&self) -> &[SideState] {
        &self.sides
    }
}

/// Fills `out` with per-cell side states; reports the lowest-indexed
/// inadmissible cell.
pub fn side_states(cons: &ConservedField, params: &SchemeParams, out: &mut Vec<SideState>) -> Result<(), ThermoError> {
    let n = cons.len();
    out.resize(
        n,
        SideState { rho: 0.0, mom: vec3::ZERO, ener: 0.0, vel: vec3::ZERO, pres: 0.0 },
    );
    let convert = |(k, side): (usize, &mut SideState)| match cons.primitive(k, params.gamma, params.floors) {
        Ok(p) => {
            *side = SideState { rho: p.rho, mom: cons.mom[k], ener: cons.ener[k], vel: p.vel, pres: p.pres };
            usize::MAX
        }
        Err(_) => k,
    };
    let first_bad = if n < PAR_MIN_LEN {
        out.iter_mut().enumerate().map(convert).min()
    } else {
        out.par_iter_mut().enumerate().with_min_len(PAR_MIN_LEN).map(convert).min()
    }
    .unwrap_or(usize::MAX);
    if first_bad < n {
        return Err(cons.primitive(first_bad, params.gamma, params.floors).unwrap_err());
    }
    Ok(())
}

/// The two side states of a face; wall faces get the mirror ghost outside.
#[inline]
pub fn face_sides(face: &Face, sides: &[SideState]) -> (SideState, SideState) {
    let a = sides[face.in_cell];
    let b = match face.out {
        Outside::Cell(c) => sides[c],
        Outside::Ghost => a.mirrored(face.normal()),
    };
    (a, b)
}

/// Face coefficients with the mesh-dependent powers evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct CoeffModel {
    mode: MuMode,
    h: f64,
    gamma: f64,
    mu_fixed: f64,
    pen: f64,
}

impl CoeffModel {
    pub fn new(grid: &Grid, params: &SchemeParams) -> Self {
        let h = grid.h();
        let gamma = params.gamma.value();
        let mu_fixed = match params.mu_mode {
            MuMode::LaxFriedrichs => 0.0,
            mode => flux::mu_coefficient(mode, h, 0.0, FaceTrace::new(1.0, 1.0), gamma),
        };
        CoeffModel { mode: params.mu_mode, h, gamma, mu_fixed, pen: params.penalty_coefficient(h) }
    }

    #[inline]
    pub fn at(&self, a: &SideState, b: &SideState, normal: Vec3) -> FluxCoeffs {
        let mu = match self.mode {
            MuMode::LaxFriedrichs => flux::face_mu(self.mode, self.h, a, b, normal, self.gamma),
            _ => self.mu_fixed,
        };
        FluxCoeffs { mu, pen: self.pen }
    }
}

pub fn face_coeffs(grid: &Grid, params: &SchemeParams, a: &SideState, b: &SideState, normal: Vec3) -> FluxCoeffs {
    CoeffModel::new(grid, params).at(a, b, normal)
}

fn fill_face_fluxes(faces: &[Face], sides: &[SideState], grid: &Grid, params: &SchemeParams, out: &mut Vec<FaceFlux>) {
    out.resize(faces.len(), FaceFlux::default());
    let model = CoeffModel::new(grid, params);
    let eval = |(f, face): (&mut FaceFlux, &Face)| {
        let (a, b) = face_sides(face, sides);
        let n = face.normal();
        *f = flux::numerical_flux(&a, &b, n, model.at(&a, &b, n));
    };
    if faces.len() < PAR_MIN_LEN {
        out.iter_mut().zip(faces).for_each(eval);
    } else {
        out.par_iter_mut().zip(faces.par_iter()).with_min_len(PAR_MIN_LEN).for_each(eval);
    }
}

pub fn rhs(cons: &ConservedField, grid: &Grid, params: &SchemeParams) -> Result<Residual, ThermoError> {
    let mut ws = RhsWorkspace::new();
    let mut out = Residual::zeros(cons.len());
    rhs_into(cons, grid, params, &mut ws, &mut out)?;
    Ok(out)
}

/// Cellwise assembly: `|K| dU_K/dt = -Σ_σ s_{K,σ} |σ| F_σ`, where `F_σ` is
/// the net flux oriented from in to out.
pub fn rhs_into(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    ws: &mut RhsWorkspace,
    out: &mut Residual,
) -> Result<(), ThermoError> {
    side_states(cons, params, &mut ws.sides)?;
    fill_face_fluxes(grid.interior_faces(), &ws.sides, grid, params, &mut ws.interior);
    fill_face_fluxes(grid.boundary_faces(), &ws.sides, grid, params, &mut ws.boundary);

    let n = cons.len();
    out.d_rho.resize(n, 0.0);
    out.d_mom.resize(n, vec3::ZERO);
    out.d_ener.resize(n, 0.0);
    let factor = -grid.face_area() / grid.cell_volume();
    let (interior, boundary) = (&ws.interior, &ws.boundary);
    let gather = |(k, ((dr, dm), de)): (usize, ((&mut f64, &mut Vec3), &mut f64))| {
        let mut acc = FaceFlux::default();
        for inc in grid.incidence(k) {
            let f = if inc.boundary { &boundary[inc.face] } else { &interior[inc.face] };
            acc.rho += inc.sign * f.rho;
            for c in 0..3 {
                acc.mom[c] += inc.sign * f.mom[c];
            }
            acc.ener += inc.sign * f.ener;
        }
        *dr = factor * acc.rho;
        *dm = vec3::scale(factor, acc.mom);
        *de = factor * acc.ener;
    };
    if n < PAR_MIN_LEN {
        out.d_rho.iter_mut().zip(out.d_mom.iter_mut()).zip(out.d_ener.iter_mut()).enumerate().for_each(gather);
    } else {
        out.d_rho
            .par_iter_mut()
            .zip(out.d_mom.par_iter_mut())
            .zip(out.d_ener.par_iter_mut())
            .enumerate()
            .with_min_len(PAR_MIN_LEN)
            .for_each(gather);
    }
    Ok(())
}

/// Which weak equation to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakEquation {
    Continuity,
    Momentum,
    Energy,
}

/// Piecewise-constant test function, scalar or vector valued.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Scalar(Vec<f64>),
    Vector(Vec<Vec3>),
}

impl TestFunction {
    pub fn constant(n: usize, value: f64) -> Self {
        TestFunction::Scalar(vec![value; n])
    }

    fn len(&self) -> usize {
        match self {
            TestFunction::Scalar(v) => v.len(),
            TestFunction::Vector(v) => v.len(),
        }
    }
}

/// Signed defect of an identity and the sum of magnitudes of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defect {
    pub defect: f64,
    pub scale: f64,
}

impl Defect {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.defect.abs() / self.scale
        } else {
            self.defect.abs()
        }
    }
}

/// Running signed sum with the matching sum of magnitudes.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct TermSum {
    pub total: f64,
    pub scale: f64,
}

impl TermSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.total += x;
        self.scale += x.abs();
    }

    pub fn defect(self) -> Defect {
        Defect { defect: self.total, scale: self.scale }
    }
}

/// Evaluates `Σ_K |K| D_t U_K Φ_K` minus the face sums of the chosen weak
/// equation, with `D_t U` taken from [`rhs`].
///
/// Face terms are written directly from the weak form: the energy pressure
/// work uses the two-sum form `p̄ [[Φu]]·n - (pΦ)‾ [[u]]·n`, and a wall face
/// sees its ghost with test value 0.
pub fn weak_form_residual(
    cons: &ConservedField,
    grid: &Grid,
    params: &SchemeParams,
    eq: WeakEquation,
    phi: &TestFunction,
) -> Result<Defect, SchemeError> {
    let n = cons.len();
    if phi.len() != n {
        return Err(SchemeError::Shape { what: "test function", expected: n, got: phi.len() });
    }
    let res = rhs(cons, grid, params)?;
    let mut sides = Vec::new();
    side_states(cons, params, &mut sides)?;
    let vol = grid.cell_volume();
    let area = grid.face_area();
    let mut sum = TermSum::default();

    // Scalar components of Φ: vector tests are handled one component at a time.
    let comps: Vec<(usize, Vec<f64>)> = match (eq, phi) {
        (WeakEquation::Momentum, TestFunction::Vector(v)) => {
            (0..3).map(|c| (c, v.iter().map(|x| x[c]).collect())).collect()
        }
        (WeakEquation::Momentum, TestFunction::Scalar(v)) => (0..3).map(|c| (c, v.clone())).collect(),
        (_, TestFunction::Scalar(v)) => vec![(0, v.clone())],
        (_, TestFunction::Vector(_)) => {
            return Err(SchemeError::Shape { what: "vector test function components", expected: 1, got: 3 })
        }
    };

    for (c, phi) in &comps {
        let c = *c;
        for k in 0..n {
            let rate = match eq {
                WeakEquation::Continuity => res.d_rho[k],
                WeakEquation::Momentum => res.d_mom[k][c],
                WeakEquation::Energy => res.d_ener[k],
            };
            sum.add(vol * rate * phi[k]);
        }
        let faces = grid.interior_faces().iter().chain(grid.boundary_faces());
        for face in faces {
            let (a, b) = face_sides(face, &sides);
            let nrm = face.normal();
            let coeffs = face_coeffs(grid, params, &a, &b, nrm);
            let ph = FaceTrace::new(phi[face.in_cell], face.out_cell().map_or(0.0, |o| phi[o]));
            let vel = FaceTrace::new(a.vel, b.vel);
            let un = vec3::dot(vel.avg(), nrm);
            let pres = FaceTrace::new(a.pres, b.pres);
            let jphi = ph.jump();
            match eq {
                WeakEquation::Continuity => {
                    sum.add(-area * flux::scalar_flux(FaceTrace::new(a.rho, b.rho), un, coeffs.mu) * jphi);
                }
                WeakEquation::Momentum => {
                    let f = flux::scalar_flux(FaceTrace::new(a.mom[c], b.mom[c]), un, coeffs.mu);
                    sum.add(-area * f * jphi);
                    sum.add(-area * pres.avg() * nrm[c] * jphi);
                    sum.add(area * coeffs.pen * vel.jump()[c] * jphi);
                }
                WeakEquation::Energy => {
                    let f = flux::scalar_flux(FaceTrace::new(a.ener, b.ener), un, coeffs.mu);
                    sum.add(-area * f * jphi);
                    let un_in = vec3::dot(a.vel, nrm);
                    let un_out = vec3::dot(b.vel, nrm);
                    let phi_u = FaceTrace::new(ph.v_in * un_in, ph.v_out * un_out);
                    let p_phi = FaceTrace::new(a.pres * ph.v_in, b.pres * ph.v_out);
                    sum.add(-area * pres.avg() * phi_u.jump());
                    sum.add(area * p_phi.avg() * (un_out - un_in));
                    sum.add(area * coeffs.pen * vec3::dot(vel.jump(), vel.avg()) * jphi);
                }
            }
        }
    }
    Ok(sum.defect())
}
