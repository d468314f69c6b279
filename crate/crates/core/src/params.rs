use std::fmt;

use crate::thermo::{Floors, Gamma};

/// Upper end of the admissible penalty exponent range `0 < α < 4/3`.
pub const ALPHA_MAX: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("alpha must lie in (0, 4/3), got {0}")]
    Alpha(f64),
    #[error("beta must lie in [0, 1), got {0}")]
    Beta(f64),
    #[error("mu_c must be positive, got {0}")]
    MuConstant(f64),
}

/// Model for the face diffusion coefficient `μ_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuMode {
    /// `μ_h = 0`.
    None,
    /// `μ_h = c h^β`.
    Power { c: f64, beta: f64 },
    /// `μ_h = ½ max_side(½|ū·n| + c_side)`, `c_side = sqrt(γ θ_side)`.
    LaxFriedrichs,
}

impl Default for MuMode {
    fn default() -> Self {
        MuMode::Power { c: 1.0, beta: 0.5 }
    }
}

impl MuMode {
    pub fn validate(&self) -> Result<(), ParamError> {
        if let MuMode::Power { c, beta } = *self {
            if !(c > 0.0 && c.is_finite()) {
                return Err(ParamError::MuConstant(c));
            }
            if !((0.0..1.0).contains(&beta)) {
                return Err(ParamError::Beta(beta));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            MuMode::None => "none",
            MuMode::Power { .. } => "power",
            MuMode::LaxFriedrichs => "lf",
        }
    }
}

impl fmt::Display for MuMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuMode::Power { c, beta } => write!(f, "power(c={c}, beta={beta})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Spatial scheme parameters. The boundary kind lives on the grid and the
/// CFL number on the step controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub gamma: Gamma,
    /// Penalty exponent; the velocity penalty coefficient is `h^(α-1)`.
    pub alpha: f64,
    pub mu_mode: MuMode,
    /// Switches the `h^(α-1)` velocity penalty terms on or off.
    pub penalty: bool,
    pub floors: Floors,
}

impl SchemeParams {
    pub fn new(gamma: Gamma, alpha: f64, mu_mode: MuMode) -> Result<Self, ParamError> {
        let params = SchemeParams {
            gamma,
            alpha,
            mu_mode,
            penalty: true,
            floors: Floors::default(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.alpha > 0.0 && self.alpha < ALPHA_MAX) {
            return Err(ParamError::Alpha(self.alpha));
        }
        self.mu_mode.validate()
    }

    pub fn with_penalty(mut self, on: bool) -> Self {
        self.penalty = on;
        self
    }

    /// `h^(α-1)` when the penalty is on, otherwise 0.
    pub fn penalty_coefficient(&self, h: f64) -> f64 {
        if self.penalty {
            h.powf(self.alpha - 1.0)
        } else {
            0.0
        }
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            gamma: Gamma::new(1.4).expect("1.4 is a valid adiabatic index"),
            alpha: 1.0,
            mu_mode: MuMode::default(),
            penalty: true,
            floors: Floors::default(),
        }
    }
}
