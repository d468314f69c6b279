//! CSV outputs: diagnostics rows, per-cell snapshots and EOC tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::diagnostics::BalanceReport;
use crate::grid::Grid;
use crate::params::SchemeParams;
use crate::thermo::ConservedField;
use crate::timeloop::{Observer, StepInfo};

pub const DIAGNOSTICS_HEADER: &str =
    "t,mass_total,energy_total,entropy_total,entropy_min,entropy_rate,bv1,bv2,bv3,dt,retries";
pub const EOC_HEADER: &str = "h,l1_rho,l1_mom,l1_ener,eoc_rho,eoc_mom,eoc_ener,bv1,bv2,bv3";
pub const RESOLUTIONS_HEADER: &str = "cells,h,steps,l1_rho,l1_mom,l1_ener,bv1,bv2,bv3";

/// Plain decimal with 17 significant digits; zero prints as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).expect("scientific format has an exponent");
    let prec = (16 - exp).max(0) as usize;
    format!("{x:.prec$}")
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(format_number).collect::<Vec<_>>().join(",")
}

/// One line of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub report: BalanceReport,
    pub dt: f64,
    pub retries: usize,
}

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        let r = &self.report;
        let bv = r.weak_bv.as_array();
        let mut s = join([
            r.t,
            r.mass_total,
            r.energy_total,
            r.entropy_total,
            r.entropy_min,
            r.entropy_rate,
            bv[0],
            bv[1],
            bv[2],
            self.dt,
        ]);
        let _ = write!(s, ",{}", self.retries);
        s
    }
}

/// Collects reports and snapshots from the time loop.
#[derive(Debug, Default)]
pub struct Recorder {
    pub rows: Vec<DiagnosticsRow>,
    pub snapshots: Vec<(f64, ConservedField)>,
}

impl Observer for Recorder {
    fn on_report(&mut self, info: &StepInfo<'_>) {
        self.rows.push(DiagnosticsRow { report: info.report.clone(), dt: info.dt, retries: info.retries });
    }

    fn on_snapshot(&mut self, t: f64, state: &ConservedField) {
        self.snapshots.push((t, state.clone()));
    }
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

pub fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

pub fn snapshot_name(t: f64) -> String {
    format!("snap_{t}.csv")
}

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];
const INDEX_NAMES: [&str; 3] = ["i", "j", "k"];

fn snapshot_header(dim: usize) -> String {
    let mut cols: Vec<String> = Vec::new();
    cols.extend(INDEX_NAMES[..dim].iter().map(|s| s.to_string()));
    cols.extend(AXIS_NAMES[..dim].iter().map(|s| s.to_string()));
    cols.push("rho".into());
    cols.extend(AXIS_NAMES[..dim].iter().map(|a| format!("m{a}")));
    cols.push("ener".into());
    cols.extend(AXIS_NAMES[..dim].iter().map(|a| format!("u{a}")));
    cols.extend(["p", "theta", "s"].map(String::from));
    cols.join(",")
}

/// One row per cell; derived columns use unfloored primitives.
pub fn snapshot_csv(state: &ConservedField, grid: &Grid, params: &SchemeParams) -> Result<String, HarnessError> {
    let dim = grid.dim();
    let mut s = snapshot_header(dim);
    s.push('\n');
    for k in 0..state.len() {
        let prim = state.primitive(k, params.gamma, params.floors)?;
        let idx = grid.unflatten(k);
        let center = grid.cell_center(k);
        for i in idx.iter().take(dim) {
            let _ = write!(s, "{i},");
        }
        let mut vals: Vec<f64> = center[..dim].to_vec();
        vals.push(state.rho[k]);
        vals.extend_from_slice(&state.mom[k][..dim]);
        vals.push(state.ener[k]);
        vals.extend_from_slice(&prim.vel[..dim]);
        vals.extend([prim.pres, prim.temp(), prim.entropy(params.gamma)]);
        s.push_str(&join(vals));
        s.push('\n');
    }
    Ok(s)
}

/// Reads the conserved columns of a snapshot back into a field.
pub fn read_snapshot(path: &Path, dim: usize) -> Result<ConservedField, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    let bad = |line: usize, msg: String| HarnessError::Format { path: path.to_path_buf(), line, message: msg };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    if header != snapshot_header(dim) {
        return Err(bad(1, format!("unexpected header '{header}'")));
    }
    let mut out = ConservedField::zeros(0);
    let first = 2 * dim;
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |c: usize| -> Result<f64, HarnessError> {
            let raw = cols.get(c).ok_or_else(|| bad(i + 2, format!("missing column {c}")))?;
            raw.parse::<f64>().map_err(|_| bad(i + 2, format!("invalid number '{raw}'")))
        };
        out.rho.push(parse(first)?);
        let mut m = [0.0; 3];
        for (a, v) in m.iter_mut().enumerate().take(dim) {
            *v = parse(first + 1 + a)?;
        }
        out.mom.push(m);
        out.ener.push(parse(first + 1 + dim)?);
    }
    Ok(out)
}

/// Writes `diagnostics.csv` and the snapshot files into `dir`; returns the snapshot paths.
pub fn write_outputs(
    dir: &Path,
    recorder: &Recorder,
    grid: &Grid,
    params: &SchemeParams,
) -> Result<Vec<PathBuf>, HarnessError> {
    create_dir(dir)?;
    write_file(&dir.join("diagnostics.csv"), &diagnostics_csv(&recorder.rows))?;
    let mut paths = Vec::new();
    for (t, state) in &recorder.snapshots {
        let path = dir.join(snapshot_name(*t));
        write_file(&path, &snapshot_csv(state, grid, params)?)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;
    use crate::thermo::{Gamma, Primitive};
    use proptest::prelude::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1.0000000000000000");
        assert_eq!(format_number(0.1), "0.10000000000000001");
        assert_eq!(format_number(-2.5e-3), "-0.0025000000000000001");
        assert_eq!(format_number(1.5e20), "150000000000000000000");
        assert_eq!(format_number(12345.678), "12345.678000000000");
    }

    #[test]
    fn diagnostics_header_and_row() {
        assert_eq!(diagnostics_csv(&[]), format!("{DIAGNOSTICS_HEADER}\n"));
        let report = BalanceReport {
            t: 0.5,
            mass_total: 1.0,
            energy_total: 2.0,
            entropy_total: 0.0,
            entropy_min: -1.0,
            entropy_rate: 0.0,
            production_terms: vec![],
            weak_bv: Default::default(),
        };
        let row = DiagnosticsRow { report, dt: 0.25, retries: 3 };
        let line = row.to_csv();
        assert_eq!(line.split(',').count(), DIAGNOSTICS_HEADER.split(',').count());
        assert!(line.starts_with("0.50000000000000000,1.0000000000000000,2.0000000000000000,0,"));
        assert!(line.ends_with(",0.25000000000000000,3"));
    }

    #[test]
    fn snapshot_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let gamma = Gamma::new(1.4).unwrap();
        let grid = Grid::new(2, &[3, 4], &[(0.0, 1.5), (-1.0, 1.0)], BoundaryKind::Wall).unwrap();
        let prims: Vec<Primitive> = (0..12)
            .map(|k| {
                let x = k as f64;
                Primitive { rho: 0.3 + x / 7.0, vel: [x.sin(), -x / 3.0, 0.0], pres: 1.0 / (1.0 + x) }
            })
            .collect();
        let state = ConservedField::from_primitives(&prims, gamma);
        let params = SchemeParams::default();
        let rec = Recorder { rows: vec![], snapshots: vec![(0.0, state.clone())] };
        let paths = write_outputs(dir.path(), &rec, &grid, &params).unwrap();
        assert_eq!(paths[0].file_name().unwrap(), "snap_0.csv");
        let back = read_snapshot(&paths[0], 2).unwrap();
        assert_eq!(back, state);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(text.starts_with("i,j,x,y,rho,mx,my,ener,ux,uy,p,theta,s\n0,0,"));
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = create_dir(&blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file/sub"), "{err}");
        let err = read_snapshot(&dir.path().join("missing.csv"), 1).unwrap_err();
        assert!(err.to_string().contains("missing.csv"));
    }

    proptest! {
        #[test]
        fn number_roundtrip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_number(x);
            prop_assert!(!s.contains('e'));
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
