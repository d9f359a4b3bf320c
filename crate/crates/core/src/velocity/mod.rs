//! Velocity grids: uniform grids sized from a macroscopic field, the support
//! function, adaptive refinement and the resulting quadratures.
//!
//! Grid cells live on an integer lattice: a coordinate along axis `k` is
//! `mid[k] + j * step[k] / 2` for an integer `j`, which makes vertex
//! deduplication exact and keeps grids with `mid = 0` bit-for-bit mirror
//! symmetric.

mod amr;
mod axisym;
mod field;
mod fine;
mod io;
mod shock;
mod support;
mod symmetry;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{MirrorPairing, Quadrature};

pub use amr::{attach_quadrature, generate_amr, generate_amr_with_cap, uniform_grid, DEFAULT_MAX_LEVEL};
pub use axisym::generate_axisym_grid;
pub use field::{FieldExtrema, MacroField};
pub use fine::{fine_grid_spec, fine_grid_spec_axisym, FineGridSpec};
pub use io::{read_grid, write_grid};
pub use shock::{normal_shock_ratios, rankine_hugoniot_fields};
pub use support::{build_support_function, in_sphere, SupportFunction};
pub use symmetry::symmetrize_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureMode {
    Q1,
    P0,
}

impl std::str::FromStr for QuadratureMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "q1" => Ok(QuadratureMode::Q1),
            "p0" => Ok(QuadratureMode::P0),
            _ => Err(format!("unknown quadrature mode `{s}` (expected q1 or p0)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CoordinateSystem {
    Cartesian {
        dim: usize,
    },
    /// `(v_x, zeta)` tree rotated over `omega` in `[0, pi]`.
    Cylindrical {
        n_omega: usize,
    },
}

/// Integer lattice shared by all cells of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub mid: [f64; 3],
    /// Spacing of unit lattice steps; cell sizes are integer multiples.
    pub step: [f64; 3],
}

impl Lattice {
    /// Coordinate of the half-integer lattice position `twice_j / 2`.
    #[inline]
    pub fn half_coord(&self, axis: usize, twice_j: i64) -> f64 {
        self.mid[axis] + twice_j as f64 * (0.5 * self.step[axis])
    }

    #[inline]
    pub fn coord(&self, axis: usize, j: i64) -> f64 {
        self.half_coord(axis, 2 * j)
    }
}

/// Leaf cell `[lo, lo + size]^d` in lattice units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub lo: [i64; 3],
    pub size: i64,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmrVelocityGrid {
    pub coordinate_system: CoordinateSystem,
    pub lattice: Lattice,
    pub root_lo: [i64; 3],
    pub root_hi: [i64; 3],
    pub leaves: Vec<Leaf>,
    pub mode: Option<QuadratureMode>,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub symmetry_pairing: Option<MirrorPairing>,
}

impl AmrVelocityGrid {
    /// Dimension of the refined tree.
    pub fn tree_dim(&self) -> usize {
        match self.coordinate_system {
            CoordinateSystem::Cartesian { dim } => dim,
            CoordinateSystem::Cylindrical { .. } => 2,
        }
    }

    /// Dimension of the quadrature points.
    pub fn point_dim(&self) -> usize {
        match self.coordinate_system {
            CoordinateSystem::Cartesian { dim } => dim,
            CoordinateSystem::Cylindrical { .. } => 3,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn root_bounds(&self) -> Vec<(f64, f64)> {
        (0..self.tree_dim())
            .map(|k| {
                (
                    self.lattice.coord(k, self.root_lo[k]),
                    self.lattice.coord(k, self.root_hi[k]),
                )
            })
            .collect()
    }

    /// Lower and upper corner of a leaf.
    pub fn leaf_bounds(&self, leaf: &Leaf) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..self.tree_dim() {
            lo[k] = self.lattice.coord(k, leaf.lo[k]);
            hi[k] = self.lattice.coord(k, leaf.lo[k] + leaf.size);
        }
        (lo, hi)
    }

    pub fn leaf_center(&self, leaf: &Leaf) -> [f64; 3] {
        let mut c = [0.0; 3];
        for (k, x) in c.iter_mut().enumerate().take(self.tree_dim()) {
            *x = self.lattice.half_coord(k, 2 * leaf.lo[k] + leaf.size);
        }
        c
    }

    pub fn leaf_half_width(&self, leaf: &Leaf) -> [f64; 3] {
        let mut h = [0.0; 3];
        for (k, x) in h.iter_mut().enumerate().take(self.tree_dim()) {
            *x = leaf.size as f64 * (0.5 * self.lattice.step[k]);
        }
        h
    }

    /// Velocity-space measure of a leaf (including the `omega` rotation for
    /// cylindrical grids).
    pub fn leaf_volume(&self, leaf: &Leaf) -> f64 {
        match self.coordinate_system {
            CoordinateSystem::Cartesian { dim } => (0..dim).map(|k| leaf.size as f64 * self.lattice.step[k]).product(),
            CoordinateSystem::Cylindrical { .. } => {
                let (lo, hi) = self.leaf_bounds(leaf);
                (hi[0] - lo[0]) * 0.5 * (hi[1] * hi[1] - lo[1] * lo[1]) * PI
            }
        }
    }

    pub fn root_volume(&self) -> f64 {
        let b = self.root_bounds();
        match self.coordinate_system {
            CoordinateSystem::Cartesian { .. } => b.iter().map(|(lo, hi)| hi - lo).product(),
            CoordinateSystem::Cylindrical { .. } => (b[0].1 - b[0].0) * 0.5 * (b[1].1 * b[1].1 - b[1].0 * b[1].0) * PI,
        }
    }

    /// Smallest and largest leaf edge over all axes.
    pub fn edge_range(&self) -> (f64, f64) {
        self.leaves.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
            let h = self.leaf_half_width(l);
            (0..self.tree_dim()).fold((lo, hi), |(lo, hi), k| (lo.min(2.0 * h[k]), hi.max(2.0 * h[k])))
        })
    }

    pub fn max_level(&self) -> u32 {
        self.leaves.iter().map(|l| l.level).max().unwrap_or(0)
    }

    /// Flat quadrature for the solver.
    pub fn quadrature(&self) -> Result<Quadrature> {
        Quadrature::new(self.point_dim(), self.points.clone(), self.weights.clone())?
            .with_pairing(self.symmetry_pairing.clone())
    }
}

/// Grid-generation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridParams {
    pub c: f64,
    pub a: f64,
    pub mode: QuadratureMode,
    pub extend_for_p0: bool,
    pub n_omega: usize,
    pub wall_t: Option<f64>,
    pub max_level: u32,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            c: 4.0,
            a: 2.0,
            mode: QuadratureMode::Q1,
            extend_for_p0: false,
            n_omega: 30,
            wall_t: None,
            max_level: DEFAULT_MAX_LEVEL,
        }
    }
}

/// Everything produced by one grid-generation pass.
#[derive(Clone, Debug)]
pub struct GridBuild {
    pub spec: FineGridSpec,
    pub support: SupportFunction,
    pub grid: AmrVelocityGrid,
}

impl GridBuild {
    /// Points of the uniform grid the adaptive one replaces.
    pub fn fine_points(&self) -> usize {
        match self.grid.coordinate_system {
            CoordinateSystem::Cartesian { .. } => self.spec.len(),
            CoordinateSystem::Cylindrical { n_omega } => self.spec.len() * (n_omega + 1),
        }
    }
}

/// Fine spec, support function, refinement and quadrature for a Cartesian grid.
pub fn build_cartesian_grid(field: &MacroField, r: f64, dim: usize, params: &GridParams) -> Result<GridBuild> {
    let spec = fine_grid_spec(field, r, dim, params.c, params.a, params.extend_for_p0)?;
    let support = build_support_function(field, &spec, r, params.c, params.wall_t);
    let grid = generate_amr_with_cap(&spec, &support, params.a, params.max_level)?;
    let grid = attach_quadrature(grid, params.mode);
    Ok(GridBuild { spec, support, grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parses_case_insensitively() {
        assert_eq!("Q1".parse::<QuadratureMode>().unwrap(), QuadratureMode::Q1);
        assert_eq!("p0".parse::<QuadratureMode>().unwrap(), QuadratureMode::P0);
        assert!("q2".parse::<QuadratureMode>().is_err());
    }

    #[test]
    fn lattice_half_steps_agree() {
        let l = Lattice {
            mid: [0.3, 0.0, 0.0],
            step: [0.7, 1.0, 1.0],
        };
        for j in -20..20 {
            assert_eq!(l.coord(0, j), l.half_coord(0, 2 * j));
        }
    }
}
