//! Face algebra and the numerical flux.
//!
//! A face has an "in" side and an "out" side and a unit normal pointing from
//! in to out. For a trace `v`, the jump is `[[v]] = v_out - v_in` and the
//! average `v̄ = (v_in + v_out)/2`.

use crate::params::MuMode;
use crate::vec3::{self, Vec3};

/// Values of one quantity on the two sides of a face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceTrace<T> {
    pub v_in: T,
    pub v_out: T,
}

impl<T> FaceTrace<T> {
    pub fn new(v_in: T, v_out: T) -> Self {
        FaceTrace { v_in, v_out }
    }
}

impl FaceTrace<f64> {
    #[inline]
    pub fn avg(&self) -> f64 {
        0.5 * (self.v_in + self.v_out)
    }

    #[inline]
    pub fn jump(&self) -> f64 {
        self.v_out - self.v_in
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> FaceTrace<f64> {
        FaceTrace::new(f(self.v_in), f(self.v_out))
    }
}

impl FaceTrace<Vec3> {
    #[inline]
    pub fn avg(&self) -> Vec3 {
        vec3::avg(self.v_in, self.v_out)
    }

    #[inline]
    pub fn jump(&self) -> Vec3 {
        vec3::sub(self.v_out, self.v_in)
    }

    pub fn component(&self, c: usize) -> FaceTrace<f64> {
        FaceTrace::new(self.v_in[c], self.v_out[c])
    }

    /// Normal components `u·n` on each side.
    pub fn dot(&self, n: Vec3) -> FaceTrace<f64> {
        FaceTrace::new(vec3::dot(self.v_in, n), vec3::dot(self.v_out, n))
    }
}

/// Coefficients of the diffusive and penalty parts of the face flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxCoeffs {
    /// Face diffusion `μ_h ≥ 0`.
    pub mu: f64,
    /// Velocity penalty `h^(α-1)`, or 0 when the penalty is switched off.
    pub pen: f64,
}

/// `Up[r] = r̄ un - ½|un| [[r]]`.
#[inline]
pub fn upwind(r: FaceTrace<f64>, un: f64) -> f64 {
    r.avg() * un - 0.5 * un.abs() * r.jump()
}

/// The same value written as `r_in [un]⁺ + r_out [un]⁻`.
#[inline]
pub fn upwind_split(r: FaceTrace<f64>, un: f64) -> f64 {
    r.v_in * un.max(0.0) + r.v_out * un.min(0.0)
}

/// Upwind and downwind values of a trace and the tilde jump `r_up - r_down`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpDown {
    pub up: f64,
    pub down: f64,
    pub tilde_jump: f64,
}

/// Selects by the sign of `un`; a stagnant face (`un = 0`) counts as
/// flowing from in to out.
#[inline]
pub fn updown_select(r: FaceTrace<f64>, un: f64) -> UpDown {
    let (up, down) = if un >= 0.0 { (r.v_in, r.v_out) } else { (r.v_out, r.v_in) };
    UpDown { up, down, tilde_jump: up - down }
}

/// Face diffusion coefficient.
///
/// `un` is `ū·n` and `theta` the temperature traces; `gamma` only matters for
/// the Lax-Friedrichs mode.
pub fn mu_coefficient(mode: MuMode, h: f64, un: f64, theta: FaceTrace<f64>, gamma: f64) -> f64 {
    match mode {
        MuMode::None => 0.0,
        MuMode::Power { c, beta } => c * h.powf(beta),
        MuMode::LaxFriedrichs => {
            let side = |t: f64| 0.5 * un.abs() + (gamma * t).sqrt();
            0.5 * side(theta.v_in).max(side(theta.v_out))
        }
    }
}

/// `F_h(r) = Up[r] - μ [[r]]`.
#[inline]
pub fn scalar_flux(r: FaceTrace<f64>, un: f64, mu: f64) -> f64 {
    upwind(r, un) - mu * r.jump()
}

/// `p̄ n`.
#[inline]
pub fn momentum_pressure_flux(p: FaceTrace<f64>, normal: Vec3) -> Vec3 {
    vec3::scale(p.avg(), normal)
}

/// `p̄ (ū·n) - ¼ [[p]] [[u·n]]`, where `un` holds the normal velocity traces.
#[inline]
pub fn energy_pressure_flux(p: FaceTrace<f64>, un: FaceTrace<f64>) -> f64 {
    p.avg() * un.avg() - 0.25 * p.jump() * un.jump()
}

/// Momentum term `pen [[u]]` and energy term `pen [[u]]·ū`.
#[inline]
pub fn penalty_fluxes(u: FaceTrace<Vec3>, pen: f64) -> (Vec3, f64) {
    let ju = u.jump();
    (vec3::scale(pen, ju), pen * vec3::dot(ju, u.avg()))
}

/// Cell quantities needed on one side of a face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideState {
    pub rho: f64,
    pub mom: Vec3,
    pub ener: f64,
    pub vel: Vec3,
    pub pres: f64,
}

impl SideState {
    #[inline]
    pub fn temp(&self) -> f64 {
        self.pres / self.rho
    }

    /// Mirror image across a wall with outward normal `n`. The total energy
    /// is copied since the kinetic energy is unchanged by the reflection.
    #[inline]
    pub fn mirrored(&self, n: Vec3) -> SideState {
        let un = vec3::dot(self.vel, n);
        let vel = vec3::sub(self.vel, vec3::scale(2.0 * un, n));
        SideState {
            rho: self.rho,
            mom: vec3::scale(self.rho, vel),
            ener: self.ener,
            vel,
            pres: self.pres,
        }
    }
}

/// Net face fluxes, oriented from in to out: what leaves the in cell per unit
/// face area.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaceFlux {
    pub rho: f64,
    pub mom: Vec3,
    pub ener: f64,
}

/// Face diffusion for a pair of side states.
#[inline]
pub fn face_mu(mode: MuMode, h: f64, a: &SideState, b: &SideState, normal: Vec3, gamma: f64) -> f64 {
    match mode {
        MuMode::LaxFriedrichs => {
            let un = vec3::dot(vec3::avg(a.vel, b.vel), normal);
            mu_coefficient(mode, h, un, FaceTrace::new(a.temp(), b.temp()), gamma)
        }
        _ => mu_coefficient(mode, h, 0.0, FaceTrace::new(1.0, 1.0), gamma),
    }
}

/// Full numerical flux: convective part with diffusion, pressure terms, and
/// the penalty terms with their sign folded in.
#[inline]
pub fn numerical_flux(a: &SideState, b: &SideState, normal: Vec3, coeffs: FluxCoeffs) -> FaceFlux {
    let vel = FaceTrace::new(a.vel, b.vel);
    let un = vec3::dot(vel.avg(), normal);
    let pres = FaceTrace::new(a.pres, b.pres);
    let (pen_mom, pen_ener) = penalty_fluxes(vel, coeffs.pen);
    let pm = momentum_pressure_flux(pres, normal);
    let mut mom = [0.0; 3];
    for c in 0..3 {
        let f = scalar_flux(FaceTrace::new(a.mom[c], b.mom[c]), un, coeffs.mu);
        mom[c] = f + pm[c] - pen_mom[c];
    }
    FaceFlux {
        rho: scalar_flux(FaceTrace::new(a.rho, b.rho), un, coeffs.mu),
        mom,
        ener: scalar_flux(FaceTrace::new(a.ener, b.ener), un, coeffs.mu)
            + energy_pressure_flux(pres, vel.dot(normal))
            - pen_ener,
    }
}
