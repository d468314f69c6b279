use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use euler_fv::harness::{self, check, convergence, HarnessError};
use euler_fv::harness::output::format_number;

#[derive(Parser)]
#[command(name = "euler-fv", version, about = "Finite-volume solver for the compressible Euler system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write diagnostics and snapshots.
    Run { config: PathBuf },
    /// Run the refinement ladder and write eoc.csv.
    Eoc { config: PathBuf },
    /// Evaluate the identity and property suite on randomized states.
    Check {
        config: PathBuf,
        /// Randomized states per boundary kind.
        #[arg(long, default_value_t = 50)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = harness::load_config(&config)?;
            let out = harness::run(&cfg)?;
            let s = &out.summary;
            println!("t = {}  steps = {}  retries = {}", s.t, s.steps, s.retries);
            println!("mass drift {:.3e}  energy drift {:.3e}", s.mass_drift, s.energy_drift);
            println!("min entropy drift {:.3e}", s.entropy_min_drift());
            let bv = s.weak_bv.as_array();
            println!("weak BV {:.6e} {:.6e} {:.6e}", bv[0], bv[1], bv[2]);
            println!("wrote {}", cfg.out_dir.display());
        }
        Command::Eoc { config } => {
            let cfg = harness::load_config(&config)?;
            let table = convergence::convergence_study(&cfg)?;
            table.write(&cfg.out_dir)?;
            println!("{:>6} {:>12} {:>12} {:>12}", "cells", "l1_rho", "l1_mom", "l1_ener");
            for r in &table.resolutions {
                println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e}", r.cells, r.errors.rho, r.errors.mom, r.errors.ener);
            }
            for r in &table.rows {
                let e = r.eoc.map(format_number);
                println!("eoc at h = {}: rho {} mom {} ener {}", r.h, e[0], e[1], e[2]);
            }
            println!("wrote {}", cfg.out_dir.join("eoc.csv").display());
        }
        Command::Check { config, states, seed } => {
            let cfg = harness::load_config(&config)?;
            let ledger = check::check_suite(&cfg, states, seed)?;
            println!("{ledger}");
            if !ledger.all_passed() {
                return Err(HarnessError::ChecksFailed { failures: ledger.failures() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
