//! Polytropic gas: `p = (γ-1)ρe = ρθ`, `e = c_v θ`, `c_v = 1/(γ-1)`,
//! specific entropy `s = log(θ^c_v / ρ)`.

use std::fmt;

use crate::vec3::{self, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThermoError {
    #[error("adiabatic index must exceed 1, got {0}")]
    BadGamma(f64),
    #[error("inadmissible state in cell {cell}: {field} = {value:e}")]
    Inadmissible {
        cell: usize,
        field: StateField,
        value: f64,
    },
    #[error("{what} must be positive, got {value:e}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("renormalization parameter {what} must be positive, got {value}")]
    BadChi { what: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateField {
    Density,
    Pressure,
    NonFinite,
}

impl fmt::Display for StateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateField::Density => "density",
            StateField::Pressure => "pressure",
            StateField::NonFinite => "non-finite value",
        })
    }
}

/// Adiabatic index, validated `γ > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma(f64);

impl Gamma {
    pub fn new(gamma: f64) -> Result<Self, ThermoError> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(Gamma(gamma))
        } else {
            Err(ThermoError::BadGamma(gamma))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn cv(self) -> f64 {
        1.0 / (self.0 - 1.0)
    }
}

/// Lower bounds below which a state counts as inadmissible. Violations are
/// reported, never clipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floors {
    pub rho: f64,
    pub pres: f64,
}

impl Default for Floors {
    fn default() -> Self {
        Floors {
            rho: 1e-12,
            pres: 1e-12,
        }
    }
}

/// Single-cell primitive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub vel: Vec3,
    pub pres: f64,
}

impl Primitive {
    /// Converts one cell; `cell` is reported as 0 in errors, callers that
    /// know the index should use [`ConservedField::primitive`].
    pub fn from_conserved(
        rho: f64,
        mom: Vec3,
        ener: f64,
        gamma: Gamma,
        floors: Option<&Floors>,
    ) -> Result<Self, ThermoError> {
        cell_primitive(0, rho, mom, ener, gamma, floors.copied().unwrap_or_default())
    }

    pub fn temp(&self) -> f64 {
        self.pres / self.rho
    }

    pub fn entropy(&self, gamma: Gamma) -> f64 {
        gamma.cv() * self.temp().ln() - self.rho.ln()
    }
}

#[inline]
fn cell_primitive(
    cell: usize,
    rho: f64,
    mom: Vec3,
    ener: f64,
    gamma: Gamma,
    floors: Floors,
) -> Result<Primitive, ThermoError> {
    if !(rho.is_finite() && ener.is_finite() && mom.iter().all(|m| m.is_finite())) {
        return Err(ThermoError::Inadmissible {
            cell,
            field: StateField::NonFinite,
            value: f64::NAN,
        });
    }
    if !(rho >= floors.rho) {
        return Err(ThermoError::Inadmissible {
            cell,
            field: StateField::Density,
            value: rho,
        });
    }
    let vel = vec3::scale(1.0 / rho, mom);
    let pres = (gamma.value() - 1.0) * (ener - 0.5 * vec3::dot(mom, vel));
    if !(pres >= floors.pres) {
        return Err(ThermoError::Inadmissible {
            cell,
            field: StateField::Pressure,
            value: pres,
        });
    }
    Ok(Primitive { rho, vel, pres })
}

/// `(ρ, m, E)` from `(ρ, u, p)`.
pub fn conserved_from_primitive(prim: &Primitive, gamma: Gamma) -> (f64, Vec3, f64) {
    let mom = vec3::scale(prim.rho, prim.vel);
    let ener = 0.5 * prim.rho * vec3::norm2(prim.vel) + gamma.cv() * prim.pres;
    (prim.rho, mom, ener)
}

/// Piecewise-constant conservative state, one entry per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedField {
    pub rho: Vec<f64>,
    pub mom: Vec<Vec3>,
    pub ener: Vec<f64>,
}

impl ConservedField {
    pub fn zeros(n: usize) -> Self {
        ConservedField {
            rho: vec![0.0; n],
            mom: vec![vec3::ZERO; n],
            ener: vec![0.0; n],
        }
    }

    pub fn from_primitives(prims: &[Primitive], gamma: Gamma) -> Self {
        let mut out = ConservedField::zeros(prims.len());
        for (k, p) in prims.iter().enumerate() {
            let (r, m, e) = conserved_from_primitive(p, gamma);
            out.rho[k] = r;
            out.mom[k] = m;
            out.ener[k] = e;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn primitive(&self, cell: usize, gamma: Gamma, floors: Floors) -> Result<Primitive, ThermoError> {
        cell_primitive(cell, self.rho[cell], self.mom[cell], self.ener[cell], gamma, floors)
    }

    /// First inadmissible cell, if any.
    pub fn check_admissible(&self, gamma: Gamma, floors: Floors) -> Result<(), ThermoError> {
        for cell in 0..self.len() {
            self.primitive(cell, gamma, floors)?;
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, rate_rho: &[f64], rate_mom: &[Vec3], rate_ener: &[f64]) {
        for (r, d) in self.rho.iter_mut().zip(rate_rho) {
            *r += a * d;
        }
        for (m, d) in self.mom.iter_mut().zip(rate_mom) {
            for c in 0..3 {
                m[c] += a * d[c];
            }
        }
        for (e, d) in self.ener.iter_mut().zip(rate_ener) {
            *e += a * d;
        }
    }

    /// `self = a * self + b * other`.
    pub fn lincomb(&mut self, a: f64, b: f64, other: &ConservedField) {
        for (x, y) in self.rho.iter_mut().zip(&other.rho) {
            *x = a * *x + b * y;
        }
        for (x, y) in self.mom.iter_mut().zip(&other.mom) {
            for c in 0..3 {
                x[c] = a * x[c] + b * y[c];
            }
        }
        for (x, y) in self.ener.iter_mut().zip(&other.ener) {
            *x = a * *x + b * y;
        }
    }
}

/// Per-cell derived quantities of an admissible [`ConservedField`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveView {
    pub vel: Vec<Vec3>,
    pub pres: Vec<f64>,
    pub temp: Vec<f64>,
    pub entr: Vec<f64>,
}

pub fn primitive_from_conserved(cons: &ConservedField, gamma: Gamma) -> Result<PrimitiveView, ThermoError> {
    primitive_from_conserved_with(cons, gamma, Floors::default())
}

pub fn primitive_from_conserved_with(
    cons: &ConservedField,
    gamma: Gamma,
    floors: Floors,
) -> Result<PrimitiveView, ThermoError> {
    let n = cons.len();
    let mut view = PrimitiveView {
        vel: Vec::with_capacity(n),
        pres: Vec::with_capacity(n),
        temp: Vec::with_capacity(n),
        entr: Vec::with_capacity(n),
    };
    for cell in 0..n {
        let p = cons.primitive(cell, gamma, floors)?;
        view.vel.push(p.vel);
        view.pres.push(p.pres);
        view.temp.push(p.temp());
        view.entr.push(p.entropy(gamma));
    }
    Ok(view)
}

/// `s = c_v log θ - log ρ`.
pub fn entropy(rho: f64, theta: f64, gamma: Gamma) -> Result<f64, ThermoError> {
    if !(rho > 0.0) {
        return Err(ThermoError::NonPositive { what: "density", value: rho });
    }
    if !(theta > 0.0) {
        return Err(ThermoError::NonPositive { what: "temperature", value: theta });
    }
    Ok(gamma.cv() * theta.ln() - rho.ln())
}

/// `s = log(p / ρ^γ) / (γ-1)`, the same quantity written in `(ρ, p)`.
pub fn entropy_from_pressure(rho: f64, pres: f64, gamma: Gamma) -> f64 {
    gamma.cv() * (pres / rho.powf(gamma.value())).ln()
}

/// `c = sqrt(γθ)`. Takes a raw `γ` so the isothermal limit `γ = 1` is usable.
pub fn speed_of_sound(theta: f64, gamma: f64) -> Result<f64, ThermoError> {
    if !(theta > 0.0) {
        return Err(ThermoError::NonPositive { what: "temperature", value: theta });
    }
    if !(gamma > 0.0) {
        return Err(ThermoError::NonPositive { what: "adiabatic index", value: gamma });
    }
    Ok((gamma * theta).sqrt())
}

/// Which concave, non-decreasing renormalization to apply to `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chi {
    /// `χ(s) = s`. Unbounded above, so excluded from sign-guaranteed checks.
    Identity,
    /// `χ(s) = min(s, 1/ε)`.
    Cap { eps: f64 },
    /// `χ(s) = min(s - s₀, 0)`.
    NegativePart { s0: f64 },
}

/// A renormalization together with an optional smoothing half-width.
///
/// With `smoothing = w > 0` the kink of `min(x, level)` is replaced on
/// `[level - w, level + w]` by a C² concave blend whose derivative follows a
/// cubic smoothstep from 1 to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSpec {
    pub chi: Chi,
    pub smoothing: f64,
}

impl ChiSpec {
    pub fn identity() -> Self {
        ChiSpec { chi: Chi::Identity, smoothing: 0.0 }
    }

    pub fn cap(eps: f64) -> Result<Self, ThermoError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ThermoError::BadChi { what: "epsilon", value: eps });
        }
        Ok(ChiSpec { chi: Chi::Cap { eps }, smoothing: 0.0 })
    }

    pub fn negative_part(s0: f64) -> Self {
        ChiSpec { chi: Chi::NegativePart { s0 }, smoothing: 0.0 }
    }

    pub fn smoothed(mut self, width: f64) -> Result<Self, ThermoError> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(ThermoError::BadChi { what: "smoothing width", value: width });
        }
        self.smoothing = width;
        Ok(self)
    }

    /// Upper bound of χ, `None` for the identity.
    pub fn upper_bound(&self) -> Option<f64> {
        match self.chi {
            Chi::Identity => None,
            Chi::Cap { eps } => Some(1.0 / eps),
            Chi::NegativePart { .. } => Some(0.0),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self.chi {
            Chi::Identity => s,
            Chi::Cap { eps } => smooth_min(s, 1.0 / eps, self.smoothing).0,
            Chi::NegativePart { s0 } => smooth_min(s - s0, 0.0, self.smoothing).0,
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match self.chi {
            Chi::Identity => 1.0,
            Chi::Cap { eps } => smooth_min(s, 1.0 / eps, self.smoothing).1,
            Chi::NegativePart { s0 } => smooth_min(s - s0, 0.0, self.smoothing).1,
        }
    }
}

/// `min(x, level)` and its derivative, optionally smoothed over
/// `[level - w, level + w]`.
pub(crate) fn smooth_min(x: f64, level: f64, w: f64) -> (f64, f64) {
    if w <= 0.0 {
        return if x < level { (x, 1.0) } else { (level, 0.0) };
    }
    let t = (x - (level - w)) / (2.0 * w);
    if t <= 0.0 {
        (x, 1.0)
    } else if t >= 1.0 {
        (level, 0.0)
    } else {
        let t2 = t * t;
        let value = x - 2.0 * w * (t2 * t - 0.5 * t2 * t2);
        let deriv = 1.0 - (3.0 * t2 - 2.0 * t2 * t);
        (value, deriv)
    }
}

pub fn renormalized_entropy(s: f64, chi: &ChiSpec) -> f64 {
    chi.value(s)
}
