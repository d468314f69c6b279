//! Mesh-refinement studies against a reference solution.

use std::path::Path;

use super::config::RunConfig;
use super::exact::ExactSolution;
use super::initial::initial_condition;
use super::output::{format_number, write_file, create_dir, EOC_HEADER, RESOLUTIONS_HEADER};
use super::{ConfigError, HarnessError};
use crate::diagnostics::WeakBv;
use crate::grid::Grid;
use crate::thermo::ConservedField;
use crate::timeloop::{advance, NoObserver};
use crate::vec3;

/// L¹ errors of density, momentum (summed over components) and energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct L1Errors {
    pub rho: f64,
    pub mom: f64,
    pub ener: f64,
}

impl L1Errors {
    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.mom, self.ener]
    }
}

/// Result of one resolution of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub cells: usize,
    pub h: f64,
    pub steps: usize,
    pub t: f64,
    pub errors: L1Errors,
    pub weak_bv: WeakBv,
}

/// Experimental orders between two consecutive resolutions, reported at the finer one.
#[derive(Debug, Clone, PartialEq)]
pub struct EocRow {
    pub h: f64,
    pub errors: L1Errors,
    pub eoc: [f64; 3],
    pub weak_bv: WeakBv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocTable {
    pub resolutions: Vec<Resolution>,
    pub rows: Vec<EocRow>,
}

/// Cell-volume weighted L¹ distance to `exact` at time `t`, sampled at cell centers.
pub fn l1_errors(state: &ConservedField, grid: &Grid, exact: &ExactSolution, t: f64, gamma: f64) -> L1Errors {
    let vol = grid.cell_volume();
    let mut e = L1Errors::default();
    for k in 0..state.len() {
        let p = exact.eval(t, grid.cell_center(k));
        let m = vec3::scale(p.rho, p.vel);
        let ener = p.pres / (gamma - 1.0) + 0.5 * p.rho * vec3::norm2(p.vel);
        e.rho += vol * (state.rho[k] - p.rho).abs();
        e.mom += vol * (0..3).map(|a| (state.mom[k][a] - m[a]).abs()).sum::<f64>();
        e.ener += vol * (state.ener[k] - ener).abs();
    }
    e
}

/// `log(e_coarse / e_fine) / log(h_coarse / h_fine)`; NaN when either error vanishes.
pub fn eoc(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    if e_coarse > 0.0 && e_fine > 0.0 {
        (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
    } else {
        f64::NAN
    }
}

fn run_resolution(cfg: &RunConfig, exact: &ExactSolution, cells: usize) -> Result<Resolution, HarnessError> {
    let grid = cfg.grid_with(cells).map_err(ConfigError::from)?;
    let params = cfg.scheme_params()?;
    let init = initial_condition(cfg, &grid, params.gamma)?;
    let mut ctl = cfg.controller();
    ctl.snapshots.clear();
    ctl.diag_every = 0;
    let summary = advance(init, &grid, &params, &ctl, &mut NoObserver)?;
    Ok(Resolution {
        cells,
        h: grid.h(),
        steps: summary.steps,
        t: summary.t,
        errors: l1_errors(&summary.state, &grid, exact, summary.t, cfg.gamma),
        weak_bv: summary.weak_bv,
    })
}

/// Runs every resolution of `cfg.ladder` concurrently and tabulates the orders.
pub fn convergence_study(cfg: &RunConfig) -> Result<EocTable, HarnessError> {
    if cfg.ladder.len() < 2 {
        return Err(ConfigError { line: None, message: "eoc needs a ladder with at least two resolutions".into() }.into());
    }
    let exact = ExactSolution::for_config(cfg)?.ok_or_else(|| ConfigError {
        line: None,
        message: format!("initial condition '{}' has no reference solution", cfg.ic.name()),
    })?;
    let results: Vec<Result<Resolution, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = cfg.ladder.iter().map(|&n| {
            let exact = &exact;
            s.spawn(move || run_resolution(cfg, exact, n))
        }).collect();
        handles.into_iter().map(|h| h.join().expect("resolution worker panicked")).collect()
    });
    let mut resolutions = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    resolutions.sort_by(|a, b| b.h.total_cmp(&a.h));
    let rows = resolutions
        .windows(2)
        .map(|w| {
            let (c, f) = (&w[0], &w[1]);
            let (ec, ef) = (c.errors.as_array(), f.errors.as_array());
            EocRow {
                h: f.h,
                errors: f.errors,
                eoc: std::array::from_fn(|i| eoc(ec[i], ef[i], c.h, f.h)),
                weak_bv: f.weak_bv,
            }
        })
        .collect();
    Ok(EocTable { resolutions, rows })
}

impl EocTable {
    pub fn eoc_csv(&self) -> String {
        let mut s = format!("{EOC_HEADER}\n");
        for r in &self.rows {
            let bv = r.weak_bv.as_array();
            let vals = [r.h, r.errors.rho, r.errors.mom, r.errors.ener, r.eoc[0], r.eoc[1], r.eoc[2], bv[0], bv[1], bv[2]];
            s.push_str(&vals.map(format_number).join(","));
            s.push('\n');
        }
        s
    }

    pub fn resolutions_csv(&self) -> String {
        let mut s = format!("{RESOLUTIONS_HEADER}\n");
        for r in &self.resolutions {
            let bv = r.weak_bv.as_array();
            let vals = [r.h, r.errors.rho, r.errors.mom, r.errors.ener, bv[0], bv[1], bv[2]];
            s.push_str(&format!("{},{},{},", r.cells, format_number(r.h), r.steps));
            s.push_str(&vals[1..].iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    /// Writes `eoc.csv` and `resolutions.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        create_dir(dir)?;
        write_file(&dir.join("eoc.csv"), &self.eoc_csv())?;
        write_file(&dir.join("resolutions.csv"), &self.resolutions_csv())
    }
}
