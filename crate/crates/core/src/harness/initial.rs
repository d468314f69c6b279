//! Cell data for the named presets, by midpoint sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{InitialCondition, RunConfig};
use super::exact::ExactSolution;
use super::HarnessError;
use crate::grid::Grid;
use crate::thermo::{ConservedField, Gamma, Primitive};

/// Samples the configured preset at the cell centers of `grid`.
pub fn initial_condition(cfg: &RunConfig, grid: &Grid, gamma: Gamma) -> Result<ConservedField, HarnessError> {
    let prims: Vec<Primitive> = match &cfg.ic {
        InitialCondition::RandomAdmissible { seed, rho, p, u_max } => {
            random_primitives(grid.num_cells(), grid.dim(), *seed, *rho, *p, *u_max)
        }
        _ => {
            let exact = ExactSolution::for_config(cfg)?.expect("every deterministic preset has a reference solution");
            (0..grid.num_cells()).map(|k| exact.eval(0.0, grid.cell_center(k))).collect()
        }
    };
    let cons = ConservedField::from_primitives(&prims, gamma);
    cons.check_admissible(gamma, Default::default())?;
    Ok(cons)
}

/// Independent uniform draws per cell; velocity components beyond `dim` stay 0.
pub fn random_primitives(n: usize, dim: usize, seed: u64, rho: (f64, f64), p: (f64, f64), u_max: f64) -> Vec<Primitive> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: f64, hi: f64| if hi > lo { rng.gen_range(lo..hi) } else { lo };
    (0..n)
        .map(|_| {
            let rho = draw(rho.0, rho.1);
            let mut vel = [0.0; 3];
            for v in vel.iter_mut().take(dim) {
                *v = draw(-u_max, u_max);
            }
            Primitive { rho, vel, pres: draw(p.0, p.1) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    fn build(text: &str) -> (RunConfig, Grid, ConservedField) {
        let cfg = parse_config(text).unwrap();
        let grid = cfg.grid().unwrap();
        let gamma = Gamma::new(cfg.gamma).unwrap();
        let cons = initial_condition(&cfg, &grid, gamma).unwrap();
        (cfg, grid, cons)
    }

    #[test]
    fn sod_states() {
        let (_, grid, cons) = build("cells = 10\nt_end = 0.2\nic = sod\nbc = wall\n");
        let g = Gamma::new(1.4).unwrap();
        for k in 0..grid.num_cells() {
            let p = cons.primitive(k, g, Default::default()).unwrap();
            let left = grid.cell_center(k)[0] < 0.5;
            let (r, pr) = if left { (1.0, 1.0) } else { (0.125, 0.1) };
            assert_eq!(p.rho, r);
            assert!((p.pres - pr).abs() < 1e-15);
            assert_eq!(p.vel, [0.0; 3]);
        }
    }

    #[test]
    fn uniform_is_constant() {
        let (_, _, cons) = build("dim = 2\ncells = 4\nt_end = 1\nic = uniform\n");
        assert!(cons.rho.iter().all(|r| *r == 1.0));
        assert!(cons.mom.iter().all(|m| *m == [0.0; 3]));
        assert!(cons.ener.iter().all(|e| (*e - 2.5).abs() < 1e-15));
    }

    #[test]
    fn contact_profile() {
        let (_, grid, cons) = build("cells = 64\nt_end = 1\nic = contact_advection\n");
        for k in 0..grid.num_cells() {
            let x = grid.cell_center(k)[0];
            let expect = 1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin();
            assert!((cons.rho[k] - expect).abs() < 1e-15);
            assert!(cons.rho[k] >= 0.5);
            assert_eq!(cons.mom[k][0], cons.rho[k]);
        }
    }

    #[test]
    fn random_is_seeded_and_in_range() {
        let (_, _, a) = build("dim = 2\ncells = 8\nt_end = 1\nic = random_admissible\nic.seed = 3\n");
        let (_, _, b) = build("dim = 2\ncells = 8\nt_end = 1\nic = random_admissible\nic.seed = 3\n");
        let (_, _, c) = build("dim = 2\ncells = 8\nt_end = 1\nic = random_admissible\nic.seed = 4\n");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.rho.iter().all(|r| (0.5..2.0).contains(r)));
        assert!(a.mom.iter().all(|m| m[2] == 0.0));
    }

    #[test]
    fn vortex_is_admissible() {
        let (_, grid, cons) = build("dim = 2\ncells = 32\nt_end = 1\nic = isentropic_vortex\n");
        let min = cons.rho.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0 && min < 1.0);
        assert_eq!(cons.len(), grid.num_cells());
    }
}
