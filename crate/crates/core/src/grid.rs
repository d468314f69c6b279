//! Uniform structured meshes with explicit face connectivity.
//!
//! Cells are cubes of edge `h`, indexed row-major (the first axis varies
//! slowest). Interior faces are enumerated axis-major, then in lexicographic
//! order of their "in" cell; the "out" cell is the neighbour in the positive
//! axis direction, so the face normal is `+e_axis`. Under periodic boundary
//! conditions the wrap-around faces are ordinary interior faces.
//!
//! Wall boundaries are represented by boundary faces whose outside trace is a
//! mirror ghost state (see [`ghost_state`]). A boundary face always has the
//! interior cell as its "in" side and the outward normal as its normal.

use std::fmt;

use crate::thermo::{conserved_from_primitive, Gamma, Primitive, ThermoError};
use crate::vec3::{self, Vec3};

/// Relative tolerance used when checking that all axes share the same `h`.
const UNIFORM_H_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    Wall,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Wall => "wall",
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "periodic" => Ok(BoundaryKind::Periodic),
            "wall" => Ok(BoundaryKind::Wall),
            other => Err(format!("unknown boundary kind `{other}` (expected periodic or wall)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("expected {expected} entries for {what}, got {got}")]
    AxisCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("axis {axis}: at least 2 cells are required, got {cells}")]
    TooFewCells { axis: usize, cells: usize },
    #[error("axis {axis}: degenerate extent [{lo}, {hi}]")]
    DegenerateExtent { axis: usize, lo: f64, hi: f64 },
    #[error("cell size differs between axes: h = {h0} on axis 0 but {h} on axis {axis}")]
    NonUniform { axis: usize, h0: f64, h: f64 },
}

/// The outside of a face: either a real cell or a ghost built from the in-cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outside {
    Cell(usize),
    Ghost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub in_cell: usize,
    pub out: Outside,
    pub axis: usize,
    /// Normal is `normal_sign * e_axis` and points from "in" to "out".
    pub normal_sign: i8,
}

impl Face {
    pub fn normal(&self) -> Vec3 {
        let mut n = [0.0; 3];
        n[self.axis] = f64::from(self.normal_sign);
        n
    }

    pub fn out_cell(&self) -> Option<usize> {
        match self.out {
            Outside::Cell(c) => Some(c),
            Outside::Ghost => None,
        }
    }
}

/// One entry of a cell's face incidence list.
///
/// `sign` is +1 when the cell is the "in" side of the face and -1 when it is
/// the "out" side. `boundary` selects between the interior and boundary face
/// lists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub face: usize,
    pub sign: f64,
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    cells: [usize; 3],
    lower: [f64; 3],
    upper: [f64; 3],
    h: f64,
    bc: BoundaryKind,
    interior: Vec<Face>,
    boundary: Vec<Face>,
    incidence_offsets: Vec<usize>,
    incidence: Vec<Incidence>,
}

impl Grid {
    /// Builds a uniform grid with `cells_per_axis[a]` cells spanning
    /// `extents[a] = (lo, hi)` on each of the `dim` axes.
    pub fn new(
        dim: usize,
        cells_per_axis: &[usize],
        extents: &[(f64, f64)],
        bc: BoundaryKind,
    ) -> Result<Self, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::BadDimension(dim));
        }
        if cells_per_axis.len() != dim {
            return Err(GridError::AxisCount {
                what: "cells_per_axis",
                expected: dim,
                got: cells_per_axis.len(),
            });
        }
        if extents.len() != dim {
            return Err(GridError::AxisCount {
                what: "extents",
                expected: dim,
                got: extents.len(),
            });
        }

        let mut cells = [1usize; 3];
        let mut lower = [0.0; 3];
        let mut upper = [0.0; 3];
        let mut h0 = 0.0;
        for axis in 0..dim {
            let n = cells_per_axis[axis];
            let (lo, hi) = extents[axis];
            if n < 2 {
                return Err(GridError::TooFewCells { axis, cells: n });
            }
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(GridError::DegenerateExtent { axis, lo, hi });
            }
            let h = (hi - lo) / n as f64;
            if axis == 0 {
                h0 = h;
            } else if (h - h0).abs() > UNIFORM_H_RTOL * h0 {
                return Err(GridError::NonUniform { axis, h0, h });
            }
            cells[axis] = n;
            lower[axis] = lo;
            upper[axis] = hi;
        }

        let mut grid = Grid {
            dim,
            cells,
            lower,
            upper,
            h: h0,
            bc,
            interior: Vec::new(),
            boundary: Vec::new(),
            incidence_offsets: Vec::new(),
            incidence: Vec::new(),
        };
        grid.enumerate_faces();
        grid.build_incidence();
        Ok(grid)
    }

    fn enumerate_faces(&mut self) {
        let n_cells = self.num_cells();
        for axis in 0..self.dim {
            let n = self.cells[axis];
            for cell in 0..n_cells {
                let mut idx = self.unflatten(cell);
                let i = idx[axis];
                let neighbour = if i + 1 < n {
                    idx[axis] = i + 1;
                    Some(self.flatten(idx))
                } else if self.bc == BoundaryKind::Periodic {
                    idx[axis] = 0;
                    Some(self.flatten(idx))
                } else {
                    None
                };
                if let Some(out) = neighbour {
                    self.interior.push(Face {
                        in_cell: cell,
                        out: Outside::Cell(out),
                        axis,
                        normal_sign: 1,
                    });
                }
            }
        }
        if self.bc == BoundaryKind::Wall {
            for axis in 0..self.dim {
                let n = self.cells[axis];
                for cell in 0..n_cells {
                    let i = self.unflatten(cell)[axis];
                    if i == 0 {
                        self.boundary.push(Face {
                            in_cell: cell,
                            out: Outside::Ghost,
                            axis,
                            normal_sign: -1,
                        });
                    }
                    if i + 1 == n {
                        self.boundary.push(Face {
                            in_cell: cell,
                            out: Outside::Ghost,
                            axis,
                            normal_sign: 1,
                        });
                    }
                }
            }
        }
    }

    fn build_incidence(&mut self) {
        let n_cells = self.num_cells();
        let mut lists: Vec<Vec<Incidence>> = vec![Vec::with_capacity(2 * self.dim); n_cells];
        for (f, face) in self.interior.iter().enumerate() {
            lists[face.in_cell].push(Incidence {
                face: f,
                sign: 1.0,
                boundary: false,
            });
            if let Outside::Cell(out) = face.out {
                lists[out].push(Incidence {
                    face: f,
                    sign: -1.0,
                    boundary: false,
                });
            }
        }
        for (f, face) in self.boundary.iter().enumerate() {
            lists[face.in_cell].push(Incidence {
                face: f,
                sign: 1.0,
                boundary: true,
            });
        }
        self.incidence_offsets = Vec::with_capacity(n_cells + 1);
        self.incidence_offsets.push(0);
        for list in lists {
            self.incidence.extend(list);
            self.incidence_offsets.push(self.incidence.len());
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per axis; unused axes report 1.
    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn extent(&self, axis: usize) -> (f64, f64) {
        (self.lower[axis], self.upper[axis])
    }

    /// `|K| = h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// `|σ| = h^(dim-1)`.
    pub fn face_area(&self) -> f64 {
        self.h.powi(self.dim as i32 - 1)
    }

    pub fn interior_faces(&self) -> &[Face] {
        &self.interior
    }

    pub fn boundary_faces(&self) -> &[Face] {
        &self.boundary
    }

    /// Faces touching `cell`, interior faces first in enumeration order,
    /// then boundary faces.
    pub fn incidence(&self, cell: usize) -> &[Incidence] {
        &self.incidence[self.incidence_offsets[cell]..self.incidence_offsets[cell + 1]]
    }

    pub fn flatten(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.cells[1] + idx[1]) * self.cells[2] + idx[2]
    }

    pub fn unflatten(&self, cell: usize) -> [usize; 3] {
        let k = cell % self.cells[2];
        let rest = cell / self.cells[2];
        let j = rest % self.cells[1];
        let i = rest / self.cells[1];
        [i, j, k]
    }

    pub fn cell_center(&self, cell: usize) -> Vec3 {
        let idx = self.unflatten(cell);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.lower[axis] + (idx[axis] as f64 + 0.5) * self.h;
        }
        x
    }

    /// Grid with the same geometry and boundary kind but `n` cells per axis.
    pub fn refined(&self, n: usize) -> Result<Grid, GridError> {
        let cells = vec![n; self.dim];
        let extents: Vec<(f64, f64)> = (0..self.dim)
            .map(|a| (self.lower[a], self.upper[a]))
            .collect();
        Grid::new(self.dim, &cells, &extents, self.bc)
    }
}

/// Mirror ghost state for a wall face with outward normal `normal`.
///
/// Density and pressure are copied and the normal velocity component is
/// reflected, so the face average of `u·n` vanishes and the density and
/// pressure jumps are exactly zero.
pub fn ghost_state(interior: &Primitive, normal: Vec3) -> Primitive {
    let un = vec3::dot(interior.vel, normal);
    Primitive {
        rho: interior.rho,
        vel: vec3::sub(interior.vel, vec3::scale(2.0 * un, normal)),
        pres: interior.pres,
    }
}

/// Conservative form of [`ghost_state`]: `(rho, m, E)` in, `(rho_g, m_g, E_g)` out.
pub fn ghost_conserved(
    rho: f64,
    mom: Vec3,
    ener: f64,
    normal: Vec3,
    gamma: Gamma,
) -> Result<(f64, Vec3, f64), ThermoError> {
    let prim = Primitive::from_conserved(rho, mom, ener, gamma, None)?;
    let ghost = ghost_state(&prim, normal);
    Ok(conserved_from_primitive(&ghost, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(dim: usize, n: usize, bc: BoundaryKind) -> Grid {
        Grid::new(dim, &vec![n; dim], &vec![(0.0, 1.0); dim], bc).unwrap()
    }

    #[test]
    fn face_counts() {
        let g = unit(1, 4, BoundaryKind::Periodic);
        assert_eq!(g.num_cells(), 4);
        assert_eq!(g.interior_faces().len(), 4);
        assert!(g.boundary_faces().is_empty());
        assert_eq!(g.h(), 0.25);

        let g = unit(1, 4, BoundaryKind::Wall);
        assert_eq!(g.interior_faces().len(), 3);
        assert_eq!(g.boundary_faces().len(), 2);

        let g = unit(2, 3, BoundaryKind::Periodic);
        assert_eq!(g.num_cells(), 9);
        assert_eq!(g.interior_faces().len(), 18);

        let g = unit(3, 3, BoundaryKind::Wall);
        assert_eq!(g.interior_faces().len(), 3 * 2 * 9);
        assert_eq!(g.boundary_faces().len(), 6 * 9);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Grid::new(1, &[1], &[(0.0, 1.0)], BoundaryKind::Wall).unwrap_err(),
            GridError::TooFewCells { axis: 0, cells: 1 }
        );
        assert!(matches!(
            Grid::new(2, &[4, 4], &[(0.0, 1.0), (0.0, 2.0)], BoundaryKind::Wall),
            Err(GridError::NonUniform { .. })
        ));
        assert!(matches!(
            Grid::new(4, &[2; 4], &[(0.0, 1.0); 4], BoundaryKind::Wall),
            Err(GridError::BadDimension(4))
        ));
        assert!(matches!(
            Grid::new(1, &[4], &[(1.0, 1.0)], BoundaryKind::Wall),
            Err(GridError::DegenerateExtent { .. })
        ));
        // non-square extents with matching cell counts are fine
        let g = Grid::new(2, &[4, 8], &[(0.0, 1.0), (0.0, 2.0)], BoundaryKind::Wall).unwrap();
        assert_eq!(g.h(), 0.25);
    }

    #[test]
    fn measures() {
        let g = unit(3, 4, BoundaryKind::Periodic);
        assert_eq!(g.cell_volume(), 0.25f64.powi(3));
        assert_eq!(g.face_area(), 0.0625);
        let g = unit(1, 4, BoundaryKind::Periodic);
        assert_eq!(g.face_area(), 1.0);
    }

    #[test]
    fn index_roundtrip_and_centers() {
        let g = Grid::new(3, &[2, 3, 4], &[(0.0, 1.0), (0.0, 1.5), (0.0, 2.0)], BoundaryKind::Wall)
            .unwrap();
        for c in 0..g.num_cells() {
            assert_eq!(g.flatten(g.unflatten(c)), c);
        }
        assert_eq!(g.unflatten(1), [0, 0, 1]);
        assert_eq!(g.cell_center(0), [0.25, 0.25, 0.25]);
    }

    #[test]
    fn every_face_has_one_in_and_one_out() {
        for bc in [BoundaryKind::Periodic, BoundaryKind::Wall] {
            let g = unit(2, 3, bc);
            let mut seen = std::collections::HashSet::new();
            for f in g.interior_faces() {
                let out = f.out_cell().unwrap();
                assert_ne!(f.in_cell, out);
                assert_eq!(f.normal_sign, 1);
                // no double counting, wrap faces included
                assert!(seen.insert((f.in_cell, out, f.axis)));
            }
            for f in g.boundary_faces() {
                assert_eq!(f.out, Outside::Ghost);
            }
        }
    }

    #[test]
    fn incidence_telescopes() {
        // Σ_K Σ_σ s_{K,σ} F_σ = 0 for any interior-face quantity
        for bc in [BoundaryKind::Periodic, BoundaryKind::Wall] {
            let g = unit(2, 5, bc);
            let values: Vec<f64> = (0..g.interior_faces().len())
                .map(|f| ((f * 7919) % 113) as f64 * 0.37 - 11.0)
                .collect();
            let mut total = 0.0;
            for cell in 0..g.num_cells() {
                for inc in g.incidence(cell) {
                    if !inc.boundary {
                        total += inc.sign * values[inc.face];
                    }
                }
            }
            assert!(total.abs() < 1e-12, "{total}");
        }
    }

    #[test]
    fn ghost_mirror() {
        let gamma = Gamma::new(1.4).unwrap();
        let (rho, m, e) = ghost_conserved(1.0, [0.3, 0.0, 0.0], 1.0 / 0.4 + 0.045, [1.0, 0.0, 0.0], gamma)
            .unwrap();
        assert_eq!(rho, 1.0);
        assert!((m[0] + 0.3).abs() < 1e-15);
        assert!((e - 2.545).abs() < 1e-14);

        let p = Primitive { rho: 1.0, vel: [0.0, 0.5, 0.0], pres: 2.0 };
        let g = ghost_state(&p, [1.0, 0.0, 0.0]);
        assert_eq!(g, p);

        let p = Primitive { rho: 1.3, vel: [0.2, -0.7, 0.1], pres: 0.9 };
        let n = [0.0, -1.0, 0.0];
        let g = ghost_state(&p, n);
        assert_eq!(g.rho, p.rho);
        assert_eq!(g.pres, p.pres);
        let avg = vec3::scale(0.5, vec3::add(p.vel, g.vel));
        assert_eq!(vec3::dot(avg, n), 0.0);
    }
}
