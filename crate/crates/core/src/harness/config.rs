//! Flat `key = value` run configuration.
//!
//! Blank lines are ignored and `#` starts a comment. Per-axis keys take a
//! `.x`, `.y` or `.z` suffix; the bare key sets every axis.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use crate::grid::{BoundaryKind, Grid, GridError};
use crate::params::{MuMode, ParamError, SchemeParams};
use crate::thermo::Gamma;
use crate::timeloop::{Integrator, StepController};
use crate::vec3::Vec3;

const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    fn general(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl From<ParamError> for ConfigError {
    fn from(e: ParamError) -> Self {
        ConfigError::general(e.to_string())
    }
}

impl From<GridError> for ConfigError {
    fn from(e: GridError) -> Self {
        ConfigError::general(e.to_string())
    }
}

/// Left and right states of a one-dimensional Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannData {
    pub rho_l: f64,
    pub u_l: f64,
    pub p_l: f64,
    pub rho_r: f64,
    pub u_r: f64,
    pub p_r: f64,
    /// Interface position along the first axis; `None` means mid-domain.
    pub x0: Option<f64>,
}

impl RiemannData {
    pub fn sod() -> Self {
        RiemannData { rho_l: 1.0, u_l: 0.0, p_l: 1.0, rho_r: 0.125, u_r: 0.0, p_r: 0.1, x0: None }
    }
}

/// Named initial-condition presets with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Uniform { rho: f64, vel: Vec3, p: f64 },
    Sod(RiemannData),
    /// `ρ = ρ₀ + A sin(2π(x - x_min)/L)`, constant velocity and pressure.
    ContactAdvection { rho0: f64, amplitude: f64, u: f64, p: f64 },
    /// Isentropic vortex of strength `eps` and radius `radius` in a uniform
    /// stream `(u, v)` with unit density and temperature.
    IsentropicVortex { eps: f64, radius: f64, u: f64, v: f64 },
    /// Independent uniform draws per cell.
    RandomAdmissible { seed: u64, rho: (f64, f64), p: (f64, f64), u_max: f64 },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Uniform { .. } => "uniform",
            InitialCondition::Sod(_) => "sod",
            InitialCondition::ContactAdvection { .. } => "contact_advection",
            InitialCondition::IsentropicVortex { .. } => "isentropic_vortex",
            InitialCondition::RandomAdmissible { .. } => "random_admissible",
        }
    }

    fn defaults(name: &str) -> Option<Self> {
        Some(match name {
            "uniform" => InitialCondition::Uniform { rho: 1.0, vel: [0.0; 3], p: 1.0 },
            "sod" => InitialCondition::Sod(RiemannData::sod()),
            "contact_advection" => InitialCondition::ContactAdvection { rho0: 1.0, amplitude: 0.5, u: 1.0, p: 1.0 },
            "isentropic_vortex" => InitialCondition::IsentropicVortex { eps: 5.0, radius: 0.1, u: 1.0, v: 1.0 },
            "random_admissible" => {
                InitialCondition::RandomAdmissible { seed: 0, rho: (0.5, 2.0), p: (0.5, 2.0), u_max: 1.0 }
            }
            _ => return None,
        })
    }

    /// Parameters as `(key, value)` pairs in canonical order.
    fn params(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format!("{x:?}");
        match self {
            InitialCondition::Uniform { rho, vel, p } => vec![
                ("rho", f(*rho)),
                ("u", f(vel[0])),
                ("v", f(vel[1])),
                ("w", f(vel[2])),
                ("p", f(*p)),
            ],
            InitialCondition::Sod(d) => {
                let mut v = vec![
                    ("rho_l", f(d.rho_l)),
                    ("u_l", f(d.u_l)),
                    ("p_l", f(d.p_l)),
                    ("rho_r", f(d.rho_r)),
                    ("u_r", f(d.u_r)),
                    ("p_r", f(d.p_r)),
                ];
                if let Some(x0) = d.x0 {
                    v.push(("x0", f(x0)));
                }
                v
            }
            InitialCondition::ContactAdvection { rho0, amplitude, u, p } => {
                vec![("rho0", f(*rho0)), ("amplitude", f(*amplitude)), ("u", f(*u)), ("p", f(*p))]
            }
            InitialCondition::IsentropicVortex { eps, radius, u, v } => {
                vec![("eps", f(*eps)), ("radius", f(*radius)), ("u", f(*u)), ("v", f(*v))]
            }
            InitialCondition::RandomAdmissible { seed, rho, p, u_max } => vec![
                ("seed", seed.to_string()),
                ("rho_min", f(rho.0)),
                ("rho_max", f(rho.1)),
                ("p_min", f(p.0)),
                ("p_max", f(p.1)),
                ("u_max", f(*u_max)),
            ],
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || parse_f64(value);
        match self {
            InitialCondition::Uniform { rho, vel, p } => match key {
                "rho" => *rho = num()?,
                "u" => vel[0] = num()?,
                "v" => vel[1] = num()?,
                "w" => vel[2] = num()?,
                "p" => *p = num()?,
                _ => return Err(unknown_ic_key(key, "uniform")),
            },
            InitialCondition::Sod(d) => match key {
                "rho_l" => d.rho_l = num()?,
                "u_l" => d.u_l = num()?,
                "p_l" => d.p_l = num()?,
                "rho_r" => d.rho_r = num()?,
                "u_r" => d.u_r = num()?,
                "p_r" => d.p_r = num()?,
                "x0" => d.x0 = Some(num()?),
                _ => return Err(unknown_ic_key(key, "sod")),
            },
            InitialCondition::ContactAdvection { rho0, amplitude, u, p } => match key {
                "rho0" => *rho0 = num()?,
                "amplitude" => *amplitude = num()?,
                "u" => *u = num()?,
                "p" => *p = num()?,
                _ => return Err(unknown_ic_key(key, "contact_advection")),
            },
            InitialCondition::IsentropicVortex { eps, radius, u, v } => match key {
                "eps" => *eps = num()?,
                "radius" => *radius = num()?,
                "u" => *u = num()?,
                "v" => *v = num()?,
                _ => return Err(unknown_ic_key(key, "isentropic_vortex")),
            },
            InitialCondition::RandomAdmissible { seed, rho, p, u_max } => match key {
                "seed" => *seed = value.parse().map_err(|_| format!("invalid seed '{value}'"))?,
                "rho_min" => rho.0 = num()?,
                "rho_max" => rho.1 = num()?,
                "p_min" => p.0 = num()?,
                "p_max" => p.1 = num()?,
                "u_max" => *u_max = num()?,
                _ => return Err(unknown_ic_key(key, "random_admissible")),
            },
        }
        Ok(())
    }
}

fn unknown_ic_key(key: &str, preset: &str) -> String {
    format!("unknown parameter 'ic.{key}' for initial condition '{preset}'")
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a finite number, got '{s}'"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got '{s}'"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(format!("expected true or false, got '{s}'")),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| item(x.trim())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub extents: Vec<(f64, f64)>,
    pub bc: BoundaryKind,
    pub gamma: f64,
    pub alpha: f64,
    pub mu_mode: String,
    pub mu_c: f64,
    pub mu_beta: f64,
    pub penalty: bool,
    pub cfl: f64,
    pub integrator: Integrator,
    pub t_end: f64,
    pub max_steps: Option<usize>,
    pub max_retries: usize,
    pub threads: usize,
    pub ic: InitialCondition,
    pub out_dir: PathBuf,
    pub diag_every: usize,
    pub snapshots: Vec<f64>,
    /// Cells per axis for each resolution of a convergence study.
    pub ladder: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 1,
            cells: vec![100],
            extents: vec![(0.0, 1.0)],
            bc: BoundaryKind::Periodic,
            gamma: 1.4,
            alpha: 1.0,
            mu_mode: "power".into(),
            mu_c: 1.0,
            mu_beta: 0.5,
            penalty: true,
            cfl: 0.3,
            integrator: Integrator::Ssprk2,
            t_end: 0.0,
            max_steps: None,
            max_retries: 8,
            threads: 1,
            ic: InitialCondition::defaults("uniform").expect("uniform preset exists"),
            out_dir: PathBuf::from("out"),
            diag_every: 100,
            snapshots: Vec::new(),
            ladder: Vec::new(),
        }
    }
}

/// Parses and validates a configuration. `cells`, `t_end` and `ic` are required.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::at(line_no, "empty key"));
        }
        if let Some((prev, _)) = entries.get(&key) {
            return Err(ConfigError::at(line_no, format!("duplicate key '{key}' (first set on line {prev})")));
        }
        order.push(key.clone());
        entries.insert(key, (line_no, value.trim().to_string()));
    }

    let mut cfg = RunConfig::default();
    let take = |k: &str| entries.get(k).cloned();
    let wrap = |line: usize| move |m: String| ConfigError::at(line, m);

    if let Some((l, v)) = take("dim") {
        cfg.dim = parse_usize(&v).map_err(wrap(l))?;
        if !(1..=3).contains(&cfg.dim) {
            return Err(ConfigError::at(l, format!("dim must be 1, 2 or 3, got {}", cfg.dim)));
        }
    }
    let dim = cfg.dim;
    cfg.cells = vec![0; dim];
    cfg.extents = vec![(0.0, 1.0); dim];
    let mut cells_set = vec![false; dim];

    for key in &order {
        let (l, v) = entries[key].clone();
        let err = wrap(l);
        let (base, axis) = match key.rsplit_once('.') {
            Some((b, a)) if AXES.contains(&a) && matches!(b, "cells" | "xmin" | "xmax") => {
                let ax = AXES.iter().position(|x| *x == a).expect("axis name is listed");
                if ax >= dim {
                    return Err(ConfigError::at(l, format!("axis '{a}' does not exist for dim = {dim}")));
                }
                (b, Some(ax))
            }
            _ => (key.as_str(), None),
        };
        let axes: Vec<usize> = match axis {
            Some(a) => vec![a],
            None => (0..dim).collect(),
        };
        match base {
            "dim" => {}
            "cells" => {
                let n = parse_usize(&v).map_err(err)?;
                for a in axes {
                    if axis.is_some() || !cells_set[a] {
                        cfg.cells[a] = n;
                        cells_set[a] = true;
                    }
                }
            }
            "xmin" | "xmax" => {
                let x = parse_f64(&v).map_err(err)?;
                for a in axes {
                    let bare_overridden = axis.is_none() && entries.contains_key(&format!("{base}.{}", AXES[a]));
                    if bare_overridden {
                        continue;
                    }
                    if base == "xmin" {
                        cfg.extents[a].0 = x;
                    } else {
                        cfg.extents[a].1 = x;
                    }
                }
            }
            "bc" => cfg.bc = v.parse().map_err(err)?,
            "gamma" => cfg.gamma = parse_f64(&v).map_err(err)?,
            "alpha" => cfg.alpha = parse_f64(&v).map_err(err)?,
            "mu_mode" => {
                if !matches!(v.as_str(), "none" | "power" | "lf") {
                    return Err(ConfigError::at(l, format!("mu_mode must be none, power or lf, got '{v}'")));
                }
                cfg.mu_mode = v;
            }
            "mu_c" => cfg.mu_c = parse_f64(&v).map_err(err)?,
            "mu_beta" => cfg.mu_beta = parse_f64(&v).map_err(err)?,
            "penalty" => cfg.penalty = parse_bool(&v).map_err(err)?,
            "cfl" => cfg.cfl = parse_f64(&v).map_err(err)?,
            "integrator" => cfg.integrator = v.parse().map_err(err)?,
            "t_end" => cfg.t_end = parse_f64(&v).map_err(err)?,
            "max_steps" => cfg.max_steps = Some(parse_usize(&v).map_err(err)?),
            "max_retries" => cfg.max_retries = parse_usize(&v).map_err(err)?,
            "threads" => cfg.threads = parse_usize(&v).map_err(err)?,
            "ic" => {
                cfg.ic = InitialCondition::defaults(&v).ok_or_else(|| {
                    ConfigError::at(
                        l,
                        format!(
                            "unknown initial condition '{v}' (expected sod, contact_advection, \
                             isentropic_vortex, uniform or random_admissible)"
                        ),
                    )
                })?;
            }
            "out_dir" => cfg.out_dir = PathBuf::from(v),
            "diag_every" => cfg.diag_every = parse_usize(&v).map_err(err)?,
            "snapshots" => cfg.snapshots = parse_list(&v, parse_f64).map_err(err)?,
            "ladder" => cfg.ladder = parse_list(&v, parse_usize).map_err(err)?,
            k if k.starts_with("ic.") => {}
            other => return Err(ConfigError::at(l, format!("unknown key '{other}'"))),
        }
    }
    for key in &order {
        if let Some(param) = key.strip_prefix("ic.") {
            let (l, v) = &entries[key];
            cfg.ic.set(param, v).map_err(|m| ConfigError::at(*l, m))?;
        }
    }

    for required in ["t_end", "ic"] {
        if !entries.contains_key(required) {
            return Err(ConfigError::general(format!("missing required key '{required}'")));
        }
    }
    if let Some(a) = cells_set.iter().position(|s| !s) {
        return Err(ConfigError::general(format!("missing required key 'cells' (axis {})", AXES[a])));
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scheme_params()?;
        self.grid()?;
        self.controller().validate().map_err(|e| ConfigError::general(e.to_string()))?;
        if let Some(n) = self.ladder.iter().find(|n| **n < 2) {
            return Err(ConfigError::general(format!("ladder entries must be at least 2, got {n}")));
        }
        if self.max_steps.is_none() && !(self.t_end >= 0.0) {
            return Err(ConfigError::general("t_end must be nonnegative"));
        }
        self.validate_ic()
    }

    fn validate_ic(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::general(m));
        match &self.ic {
            InitialCondition::Uniform { rho, p, .. } if !(*rho > 0.0 && *p > 0.0) => {
                bad(format!("uniform state needs positive rho and p, got rho = {rho}, p = {p}"))
            }
            InitialCondition::Sod(d) if !(d.rho_l > 0.0 && d.rho_r > 0.0 && d.p_l > 0.0 && d.p_r > 0.0) => {
                bad("Riemann data needs positive densities and pressures".into())
            }
            InitialCondition::ContactAdvection { rho0, amplitude, p, .. }
                if !(rho0 - amplitude.abs() > 0.0 && *p > 0.0) =>
            {
                bad(format!("contact_advection needs rho0 > |amplitude| and p > 0, got rho0 = {rho0}, amplitude = {amplitude}"))
            }
            InitialCondition::IsentropicVortex { eps, radius, .. } => {
                let g = self.gamma;
                if self.dim != 2 {
                    return bad("isentropic_vortex requires dim = 2".into());
                }
                if !(*radius > 0.0) {
                    return bad(format!("vortex radius must be positive, got {radius}"));
                }
                let theta_min = 1.0 - (g - 1.0) * eps * eps / (8.0 * g * std::f64::consts::PI.powi(2)) * 1f64.exp();
                if !(theta_min > 0.0) {
                    return bad(format!("vortex strength {eps} gives a nonpositive core temperature"));
                }
                Ok(())
            }
            InitialCondition::RandomAdmissible { rho, p, u_max, .. }
                if !(rho.0 > 0.0 && rho.1 >= rho.0 && p.0 > 0.0 && p.1 >= p.0 && *u_max >= 0.0) =>
            {
                bad("random_admissible needs 0 < rho_min <= rho_max, 0 < p_min <= p_max, u_max >= 0".into())
            }
            _ => Ok(()),
        }
    }

    pub fn mu(&self) -> MuMode {
        match self.mu_mode.as_str() {
            "none" => MuMode::None,
            "lf" => MuMode::LaxFriedrichs,
            _ => MuMode::Power { c: self.mu_c, beta: self.mu_beta },
        }
    }

    pub fn scheme_params(&self) -> Result<SchemeParams, ConfigError> {
        let gamma = Gamma::new(self.gamma).map_err(|e| ConfigError::general(e.to_string()))?;
        // Validate the power-law constants even when another mode is selected.
        MuMode::Power { c: self.mu_c, beta: self.mu_beta }.validate()?;
        Ok(SchemeParams::new(gamma, self.alpha, self.mu())?.with_penalty(self.penalty))
    }

    pub fn grid(&self) -> Result<Grid, GridError> {
        Grid::new(self.dim, &self.cells, &self.extents, self.bc)
    }

    /// Same domain with `n` cells on every axis.
    pub fn grid_with(&self, n: usize) -> Result<Grid, GridError> {
        Grid::new(self.dim, &vec![n; self.dim], &self.extents, self.bc)
    }

    pub fn controller(&self) -> StepController {
        let mut c = StepController::new(self.cfl, self.t_end, self.integrator);
        c.max_steps = self.max_steps;
        c.max_retries = self.max_retries;
        c.threads = self.threads;
        c.diag_every = self.diag_every;
        c.snapshots = self.snapshots.clone();
        c
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn serialize(&self) -> String {
        let f = |x: f64| format!("{x:?}");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("dim", self.dim.to_string());
        for a in 0..self.dim {
            let suffix = if self.dim == 1 { String::new() } else { format!(".{}", AXES[a]) };
            kv(&format!("cells{suffix}"), self.cells[a].to_string());
            kv(&format!("xmin{suffix}"), f(self.extents[a].0));
            kv(&format!("xmax{suffix}"), f(self.extents[a].1));
        }
        kv("bc", self.bc.to_string());
        kv("gamma", f(self.gamma));
        kv("alpha", f(self.alpha));
        kv("mu_mode", self.mu_mode.clone());
        kv("mu_c", f(self.mu_c));
        kv("mu_beta", f(self.mu_beta));
        kv("penalty", self.penalty.to_string());
        kv("cfl", f(self.cfl));
        kv("integrator", self.integrator.to_string());
        kv("t_end", f(self.t_end));
        if let Some(m) = self.max_steps {
            kv("max_steps", m.to_string());
        }
        kv("max_retries", self.max_retries.to_string());
        kv("threads", self.threads.to_string());
        kv("ic", self.ic.name().to_string());
        for (k, v) in self.ic.params() {
            kv(&format!("ic.{k}"), v);
        }
        kv("out_dir", self.out_dir.display().to_string());
        kv("diag_every", self.diag_every.to_string());
        kv("snapshots", self.snapshots.iter().map(|x| f(*x)).collect::<Vec<_>>().join(", "));
        kv("ladder", self.ladder.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SOD: &str = "\
# shock tube
dim = 1
cells = 400
bc = wall
t_end = 0.2
ic = sod
";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(SOD).unwrap();
        assert_eq!(c.cfl, 0.3);
        assert_eq!(c.integrator, Integrator::Ssprk2);
        assert_eq!(c.cells, vec![400]);
        assert_eq!(c.bc, BoundaryKind::Wall);
        assert_eq!(c.ic, InitialCondition::Sod(RiemannData::sod()));
        assert_eq!(c.mu(), MuMode::Power { c: 1.0, beta: 0.5 });
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        let e = parse_config(&format!("{SOD}alpha = 1.5\n")).unwrap_err();
        assert!(e.to_string().contains("alpha must lie in (0, 4/3)"), "{e}");
        let e = parse_config(&format!("{SOD}mu_beta = 1.0\n")).unwrap_err();
        assert!(e.to_string().contains("beta must lie in [0, 1)"), "{e}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("dim = 1\ncells = 10\nbogus = 3\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("unknown key 'bogus'"));
        let e = parse_config("dim = 1\ncells 10\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_config("cells = 10\ncells = 12\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_config(&format!("{SOD}ic.nope = 1\n")).unwrap_err();
        assert_eq!(e.line, Some(7));
        let e = parse_config("cells = 10\nt_end = 1\n").unwrap_err();
        assert!(e.message.contains("'ic'"));
    }

    #[test]
    fn per_axis_keys() {
        let text = "dim = 2\ncells = 8\ncells.y = 4\nxmin = 0\nxmax = 1\nxmax.y = 0.5\nt_end = 0.1\nic = uniform\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.cells, vec![8, 4]);
        assert_eq!(c.extents, vec![(0.0, 1.0), (0.0, 0.5)]);
        assert!(parse_config("dim = 1\ncells.y = 4\nt_end = 1\nic = uniform\n").is_err());
        let bad = "dim = 2\ncells = 8\ncells.y = 5\nt_end = 0.1\nic = uniform\n";
        assert!(parse_config(bad).unwrap_err().message.contains("cell size differs"));
    }

    #[test]
    fn ic_parameters() {
        let c = parse_config("cells = 16\nt_end = 1\nic = random_admissible\nic.seed = 42\nic.u_max = 0.5\n").unwrap();
        assert!(matches!(c.ic, InitialCondition::RandomAdmissible { seed: 42, u_max, .. } if u_max == 0.5));
        assert!(parse_config("cells = 16\nt_end = 1\nic = contact_advection\nic.amplitude = 2\n").is_err());
        assert!(parse_config("cells = 16\nt_end = 1\nic = isentropic_vortex\n").is_err());
    }

    #[test]
    fn serialize_roundtrip_examples() {
        let texts = [
            SOD.to_string(),
            "dim = 2\ncells = 32\nbc = periodic\nt_end = 0.1\nic = isentropic_vortex\nsnapshots = 0, 0.05\nladder = 32, 64\nmu_mode = lf\n".into(),
            format!("{SOD}ic.x0 = 0.3\nmax_steps = 1000\npenalty = off\nthreads = 4\n"),
        ];
        for t in texts {
            let c = parse_config(&t).unwrap();
            let s = c.serialize();
            let c2 = parse_config(&s).unwrap();
            assert_eq!(c, c2);
            assert_eq!(s, c2.serialize());
        }
    }

    proptest! {
        #[test]
        fn serialize_roundtrip(n in 2usize..500, lo in -10.0f64..10.0, len in 1e-3f64..100.0, gamma in 1.01f64..3.0,
                               alpha in 0.01f64..1.33, beta in 0.0f64..0.999, cfl in 0.01f64..1.0,
                               t_end in 0.0f64..10.0, seed in 0u64..u64::MAX, snaps in proptest::collection::vec(0.0f64..1.0, 0..4)) {
            let c = RunConfig {
                cells: vec![n],
                extents: vec![(lo, lo + len)],
                gamma,
                alpha,
                mu_beta: beta,
                cfl,
                t_end,
                ic: InitialCondition::RandomAdmissible { seed, rho: (0.5, 2.0), p: (0.5, 2.0), u_max: 1.0 },
                snapshots: snaps.iter().map(|s| s * t_end).collect(),
                ..RunConfig::default()
            };
            prop_assume!(c.validate().is_ok());
            let back = parse_config(&c.serialize()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
