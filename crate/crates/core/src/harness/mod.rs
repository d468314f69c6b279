//! Configuration, initial data, reference solutions, refinement studies and
//! file outputs around the solver.

pub mod check;
pub mod config;
pub mod convergence;
pub mod exact;
pub mod initial;
pub mod output;
pub mod riemann;

use std::path::{Path, PathBuf};

pub use config::{parse_config, ConfigError, InitialCondition, RunConfig};

use crate::scheme::SchemeError;
use crate::thermo::ThermoError;
use crate::timeloop::{advance, RunSummary, TimeloopError};
use output::Recorder;
use riemann::RiemannError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid Riemann data: {0}")]
    Riemann(#[from] RiemannError),
    #[error("inadmissible state: {0}")]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Timeloop(#[from] TimeloopError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },
    #[error("{failures} identity check(s) failed")]
    ChecksFailed { failures: usize },
}

impl HarnessError {
    /// Process exit status: 2 configuration, 3 admissibility, 4 identity
    /// suite, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Riemann(_) => 2,
            HarnessError::Thermo(_) => 3,
            HarnessError::Scheme(SchemeError::Thermo(_)) => 3,
            HarnessError::Scheme(_) => 1,
            HarnessError::Timeloop(e) => match e {
                TimeloopError::Admissibility { .. } | TimeloopError::NonFinite { .. } => 3,
                TimeloopError::Scheme(_) => 3,
                TimeloopError::Controller(_) => 2,
                TimeloopError::ThreadPool(_) => 1,
            },
            HarnessError::ChecksFailed { .. } => 4,
            HarnessError::Io { .. } | HarnessError::Format { .. } => 1,
        }
    }
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, HarnessError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_config(&text)?)
}

/// A finished simulation together with everything it recorded.
#[derive(Debug)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub recorder: Recorder,
    pub snapshot_paths: Vec<PathBuf>,
}

/// Runs the configured simulation without touching the filesystem.
pub fn simulate(cfg: &RunConfig) -> Result<(RunSummary, Recorder), HarnessError> {
    let grid = cfg.grid().map_err(ConfigError::from)?;
    let params = cfg.scheme_params()?;
    let init = initial::initial_condition(cfg, &grid, params.gamma)?;
    let mut recorder = Recorder::default();
    let summary = advance(init, &grid, &params, &cfg.controller(), &mut recorder)?;
    Ok((summary, recorder))
}

/// Runs the configured simulation and writes `config.txt`, `diagnostics.csv`
/// and the snapshots into `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    let (summary, recorder) = simulate(cfg)?;
    let grid = cfg.grid().map_err(ConfigError::from)?;
    let params = cfg.scheme_params()?;
    output::create_dir(&cfg.out_dir)?;
    output::write_file(&cfg.out_dir.join("config.txt"), &cfg.serialize())?;
    let snapshot_paths = output::write_outputs(&cfg.out_dir, &recorder, &grid, &params)?;
    Ok(RunOutput { summary, recorder, snapshot_paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "cells = 50\nbc = wall\nt_end = 0.01\nic = sod\nsnapshots = 0, 0.005\ndiag_every = 10\nout_dir = {}\n",
            dir.path().display()
        );
        let cfg = parse_config(&text).unwrap();
        let out = run(&cfg).unwrap();
        let diag = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert!(diag.starts_with(output::DIAGNOSTICS_HEADER));
        assert_eq!(diag.lines().count(), 1 + out.recorder.rows.len());
        assert_eq!(out.snapshot_paths.len(), 2);
        let snap0 = output::read_snapshot(&out.snapshot_paths[0], 1).unwrap();
        let grid = cfg.grid().unwrap();
        let init = initial::initial_condition(&cfg, &grid, cfg.scheme_params().unwrap().gamma).unwrap();
        assert_eq!(snap0, init);
        let echoed = parse_config(&std::fs::read_to_string(dir.path().join("config.txt")).unwrap()).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn exit_codes() {
        let cfg_err = parse_config("alpha = 2\n").unwrap_err();
        assert_eq!(HarnessError::from(cfg_err).exit_code(), 2);
        let adm = TimeloopError::NonFinite { t: 0.0, step: 0 };
        assert_eq!(HarnessError::from(adm).exit_code(), 3);
        assert_eq!(HarnessError::ChecksFailed { failures: 1 }.exit_code(), 4);
        let io = load_config(Path::new("/nonexistent/run.cfg")).unwrap_err();
        assert_eq!(io.exit_code(), 1);
        assert!(io.to_string().contains("/nonexistent/run.cfg"));
    }
}
