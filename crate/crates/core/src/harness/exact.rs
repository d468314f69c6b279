//! Closed-form reference solutions and a finite-difference Euler residual.

use std::f64::consts::PI;

use super::config::{InitialCondition, RiemannData, RunConfig};
use super::riemann::{RiemannError, RiemannSolution, State1d};
use crate::thermo::{Gamma, Primitive};
use crate::vec3::Vec3;

/// Reference solution on a given domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    Uniform(Primitive),
    ContactAdvection { rho0: f64, amplitude: f64, u: f64, p: f64, xmin: f64, length: f64 },
    IsentropicVortex { eps: f64, radius: f64, vel: [f64; 2], center: [f64; 2], lengths: [f64; 2], gamma: f64 },
    SodRiemann { solution: RiemannSolution, x0: f64 },
}

impl ExactSolution {
    /// Reference solution for the configured problem; `None` for random data.
    pub fn for_config(cfg: &RunConfig) -> Result<Option<Self>, RiemannError> {
        let ext = &cfg.extents;
        Ok(Some(match &cfg.ic {
            InitialCondition::Uniform { rho, vel, p } => ExactSolution::Uniform(Primitive { rho: *rho, vel: *vel, pres: *p }),
            InitialCondition::ContactAdvection { rho0, amplitude, u, p } => ExactSolution::ContactAdvection {
                rho0: *rho0,
                amplitude: *amplitude,
                u: *u,
                p: *p,
                xmin: ext[0].0,
                length: ext[0].1 - ext[0].0,
            },
            InitialCondition::IsentropicVortex { eps, radius, u, v } => {
                let (ex, ey) = (ext[0], ext.get(1).copied().unwrap_or((0.0, 1.0)));
                ExactSolution::IsentropicVortex {
                    eps: *eps,
                    radius: *radius,
                    vel: [*u, *v],
                    center: [0.5 * (ex.0 + ex.1), 0.5 * (ey.0 + ey.1)],
                    lengths: [ex.1 - ex.0, ey.1 - ey.0],
                    gamma: cfg.gamma,
                }
            }
            InitialCondition::Sod(d) => Self::riemann(d, cfg.gamma, ext[0])?,
            InitialCondition::RandomAdmissible { .. } => return Ok(None),
        }))
    }

    fn riemann(d: &RiemannData, gamma: f64, ext: (f64, f64)) -> Result<Self, RiemannError> {
        let solution = RiemannSolution::solve(
            State1d { rho: d.rho_l, u: d.u_l, p: d.p_l },
            State1d { rho: d.rho_r, u: d.u_r, p: d.p_r },
            gamma,
        )?;
        Ok(ExactSolution::SodRiemann { solution, x0: d.x0.unwrap_or(0.5 * (ext.0 + ext.1)) })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExactSolution::Uniform(_) => "uniform",
            ExactSolution::ContactAdvection { .. } => "contact_advection",
            ExactSolution::IsentropicVortex { .. } => "isentropic_vortex",
            ExactSolution::SodRiemann { .. } => "sod_riemann",
        }
    }

    /// Primitive state at time `t` and point `x`.
    pub fn eval(&self, t: f64, x: Vec3) -> Primitive {
        match self {
            ExactSolution::Uniform(p) => *p,
            ExactSolution::ContactAdvection { rho0, amplitude, u, p, xmin, length } => {
                let phase = 2.0 * PI * (x[0] - xmin - u * t) / length;
                Primitive { rho: rho0 + amplitude * phase.sin(), vel: [*u, 0.0, 0.0], pres: *p }
            }
            ExactSolution::IsentropicVortex { eps, radius, vel, center, lengths, gamma } => {
                let wrap = |d: f64, l: f64| d - l * (d / l).round();
                let dx = wrap(x[0] - center[0] - vel[0] * t, lengths[0]) / radius;
                let dy = wrap(x[1] - center[1] - vel[1] * t, lengths[1]) / radius;
                let r2 = dx * dx + dy * dy;
                let g = *gamma;
                let du = eps / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
                let theta = 1.0 - (g - 1.0) * eps * eps / (8.0 * g * PI * PI) * (1.0 - r2).exp();
                let rho = theta.powf(1.0 / (g - 1.0));
                Primitive { rho, vel: [vel[0] - du * dy, vel[1] + du * dx, 0.0], pres: rho * theta }
            }
            ExactSolution::SodRiemann { solution, x0 } => {
                let s = if t > 0.0 {
                    solution.sample((x[0] - x0) / t)
                } else if x[0] < *x0 {
                    solution.left
                } else {
                    solution.right
                };
                Primitive { rho: s.rho, vel: [s.u, 0.0, 0.0], pres: s.p }
            }
        }
    }
}

/// Conserved variables `(ρ, m, E)` as a flat 5-vector.
fn conserved(p: &Primitive, g: f64) -> [f64; 5] {
    let m = [p.rho * p.vel[0], p.rho * p.vel[1], p.rho * p.vel[2]];
    let kin = 0.5 * (m[0] * p.vel[0] + m[1] * p.vel[1] + m[2] * p.vel[2]);
    [p.rho, m[0], m[1], m[2], p.pres / (g - 1.0) + kin]
}

/// Physical flux along `axis` as a flat 5-vector.
fn physical_flux(p: &Primitive, g: f64, axis: usize) -> [f64; 5] {
    let u = conserved(p, g);
    let un = p.vel[axis];
    let mut f = [u[0] * un, u[1] * un, u[2] * un, u[3] * un, (u[4] + p.pres) * un];
    f[1 + axis] += p.pres;
    f
}

/// Pointwise Euler residual `∂_t U + Σ_d ∂_d F_d(U)` by fourth-order central
/// differences with step `delta`, together with the largest magnitude of the
/// individual derivative terms (the residual's natural scale).
pub fn euler_residual(sol: &ExactSolution, gamma: Gamma, dim: usize, t: f64, x: Vec3, delta: f64) -> ([f64; 5], f64) {
    let g = gamma.value();
    let d4 = |f: &dyn Fn(f64) -> [f64; 5]| -> [f64; 5] {
        let (a, b, c, d) = (f(-2.0 * delta), f(-delta), f(delta), f(2.0 * delta));
        std::array::from_fn(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * delta))
    };
    let mut res = [0.0; 5];
    let mut scale = 0.0f64;
    let dt = d4(&|s| conserved(&sol.eval(t + s, x), g));
    for i in 0..5 {
        res[i] += dt[i];
        scale = scale.max(dt[i].abs());
    }
    for axis in 0..dim {
        let dx = d4(&|s| {
            let mut y = x;
            y[axis] += s;
            physical_flux(&sol.eval(t, y), g, axis)
        });
        for i in 0..5 {
            res[i] += dx[i];
            scale = scale.max(dx[i].abs());
        }
    }
    (res, scale)
}
