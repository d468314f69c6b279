//! Exact self-similar solution of the one-dimensional Riemann problem for a
//! polytropic gas.

/// Density, velocity and pressure of one side or one sampled point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State1d {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RiemannError {
    #[error("Riemann data must have positive density and pressure on both sides")]
    BadState,
    #[error("gamma must exceed 1, got {0}")]
    BadGamma(f64),
    #[error("the data generate vacuum (pressure positivity condition violated by {0})")]
    Vacuum(f64),
    #[error("pressure root solve did not converge")]
    NoConvergence,
}

/// Tolerance on the relative pressure change and on the scaled pressure function.
pub const PRESSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: State1d,
    pub right: State1d,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
}

fn sound(s: &State1d, g: f64) -> f64 {
    (g * s.p / s.rho).sqrt()
}

/// Pressure function of one side and its derivative in `p`.
fn side_function(p: f64, s: &State1d, g: f64) -> (f64, f64) {
    let c = sound(s, g);
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (b + p)))
    } else {
        let e = (g - 1.0) / (2.0 * g);
        let r = (p / s.p).powf(e);
        (2.0 * c / (g - 1.0) * (r - 1.0), (p / s.p).powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c))
    }
}

/// `f_L(p) + f_R(p) + u_R - u_L`, whose root is the star pressure.
pub fn pressure_function(p: f64, left: &State1d, right: &State1d, gamma: f64) -> f64 {
    side_function(p, left, gamma).0 + side_function(p, right, gamma).0 + right.u - left.u
}

fn deriv(p: f64, left: &State1d, right: &State1d, g: f64) -> f64 {
    side_function(p, left, g).1 + side_function(p, right, g).1
}

impl RiemannSolution {
    pub fn solve(left: State1d, right: State1d, gamma: f64) -> Result<Self, RiemannError> {
        let ok = |s: &State1d| s.rho > 0.0 && s.p > 0.0 && s.rho.is_finite() && s.p.is_finite() && s.u.is_finite();
        if !ok(&left) || !ok(&right) {
            return Err(RiemannError::BadState);
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(RiemannError::BadGamma(gamma));
        }
        let (cl, cr) = (sound(&left, gamma), sound(&right, gamma));
        let vacuum_margin = 2.0 / (gamma - 1.0) * (cl + cr) - (right.u - left.u);
        if vacuum_margin <= 0.0 {
            return Err(RiemannError::Vacuum(-vacuum_margin));
        }
        if left == right {
            return Ok(RiemannSolution { left, right, gamma, p_star: left.p, u_star: left.u });
        }
        let p_star = solve_pressure(&left, &right, gamma)?;
        let (fl, _) = side_function(p_star, &left, gamma);
        let (fr, _) = side_function(p_star, &right, gamma);
        let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        Ok(RiemannSolution { left, right, gamma, p_star, u_star })
    }

    /// State at similarity coordinate `xi = (x - x0) / t`.
    pub fn sample(&self, xi: f64) -> State1d {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let gm = (g - 1.0) / (g + 1.0);
        if xi <= us {
            let s = &self.left;
            let c = sound(s, g);
            if ps > s.p {
                let ratio = ps / s.p;
                let shock = s.u - c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                if xi <= shock {
                    *s
                } else {
                    State1d { rho: s.rho * (ratio + gm) / (gm * ratio + 1.0), u: us, p: ps }
                }
            } else {
                let head = s.u - c;
                let c_star = c * (ps / s.p).powf((g - 1.0) / (2.0 * g));
                let tail = us - c_star;
                if xi <= head {
                    *s
                } else if xi >= tail {
                    State1d { rho: s.rho * (ps / s.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let f = 2.0 / (g + 1.0) + gm / c * (s.u - xi);
                    let rho = s.rho * f.powf(2.0 / (g - 1.0));
                    let u = 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * s.u + xi);
                    State1d { rho, u, p: s.p * f.powf(2.0 * g / (g - 1.0)) }
                }
            }
        } else {
            let s = &self.right;
            let c = sound(s, g);
            if ps > s.p {
                let ratio = ps / s.p;
                let shock = s.u + c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                if xi >= shock {
                    *s
                } else {
                    State1d { rho: s.rho * (ratio + gm) / (gm * ratio + 1.0), u: us, p: ps }
                }
            } else {
                let head = s.u + c;
                let c_star = c * (ps / s.p).powf((g - 1.0) / (2.0 * g));
                let tail = us + c_star;
                if xi >= head {
                    *s
                } else if xi <= tail {
                    State1d { rho: s.rho * (ps / s.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let f = 2.0 / (g + 1.0) - gm / c * (s.u - xi);
                    let rho = s.rho * f.powf(2.0 / (g - 1.0));
                    let u = 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * s.u + xi);
                    State1d { rho, u, p: s.p * f.powf(2.0 * g / (g - 1.0)) }
                }
            }
        }
    }
}

/// Safeguarded Newton iteration inside a shrinking bracket.
fn solve_pressure(left: &State1d, right: &State1d, g: f64) -> Result<f64, RiemannError> {
    let f = |p: f64| pressure_function(p, left, right, g);
    let scale = left.p.max(right.p);
    let mut lo = 0.0f64;
    let mut hi = scale;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(RiemannError::NoConvergence);
        }
    }
    // f is increasing and f(0+) < 0 whenever there is no vacuum.
    let (cl, cr) = (sound(left, g), sound(right, g));
    let two_rarefaction = {
        let z = (g - 1.0) / (2.0 * g);
        let num = cl + cr - 0.5 * (g - 1.0) * (right.u - left.u);
        let den = cl / left.p.powf(z) + cr / right.p.powf(z);
        (num / den).powf(1.0 / z)
    };
    let mut p = if two_rarefaction > lo && two_rarefaction < hi { two_rarefaction } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let fp = f(p);
        if fp == 0.0 {
            return Ok(p);
        }
        if fp < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - fp / deriv(p, left, right, g);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - p).abs() <= PRESSURE_TOL * p.max(f64::MIN_POSITIVE)
            && f(next).abs() <= PRESSURE_TOL * (cl + cr + (right.u - left.u).abs());
        p = next;
        if converged || hi - lo <= PRESSURE_TOL * p {
            return Ok(p);
        }
    }
    Err(RiemannError::NoConvergence)
}
