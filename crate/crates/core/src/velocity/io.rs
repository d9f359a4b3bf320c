//! JSON grid files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{MirrorPairing, Quadrature};
use crate::velocity::{AmrVelocityGrid, CoordinateSystem, Lattice, Leaf, QuadratureMode};

const SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafRecord {
    center: Vec<f64>,
    half_width: Vec<f64>,
    level: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    schema: u32,
    coordinate_system: CoordinateSystem,
    root_bounds: Vec<[f64; 2]>,
    lattice: Lattice,
    mode: Option<QuadratureMode>,
    leaves: Vec<LeafRecord>,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    symmetry_pairing: Option<MirrorPairing>,
}

impl GridFile {
    fn from_grid(g: &AmrVelocityGrid) -> Self {
        let td = g.tree_dim();
        let pd = g.point_dim();
        GridFile {
            schema: SCHEMA,
            coordinate_system: g.coordinate_system,
            root_bounds: g.root_bounds().into_iter().map(|(lo, hi)| [lo, hi]).collect(),
            lattice: g.lattice,
            mode: g.mode,
            leaves: g
                .leaves
                .iter()
                .map(|l| LeafRecord {
                    center: g.leaf_center(l)[..td].to_vec(),
                    half_width: g.leaf_half_width(l)[..td].to_vec(),
                    level: l.level,
                })
                .collect(),
            points: g.points.iter().map(|p| p[..pd].to_vec()).collect(),
            weights: g.weights.clone(),
            symmetry_pairing: g.symmetry_pairing.clone(),
        }
    }

    fn into_grid(self) -> std::result::Result<AmrVelocityGrid, String> {
        if self.schema != SCHEMA {
            return Err(format!("unsupported grid schema {}", self.schema));
        }
        let td = match self.coordinate_system {
            CoordinateSystem::Cartesian { dim } if (1..=3).contains(&dim) => dim,
            CoordinateSystem::Cartesian { dim } => return Err(format!("unsupported dimension {dim}")),
            CoordinateSystem::Cylindrical { .. } => 2,
        };
        let lat = self.lattice;
        if (0..td).any(|k| !(lat.step[k].is_finite() && lat.step[k] > 0.0)) {
            return Err("lattice steps must be positive".into());
        }
        if self.root_bounds.len() != td {
            return Err(format!("{} root bounds for a {td}-d tree", self.root_bounds.len()));
        }
        let to_lattice = |k: usize, x: f64| -> std::result::Result<i64, String> {
            let j = ((x - lat.mid[k]) / lat.step[k]).round();
            if lat.coord(k, j as i64) != x {
                return Err(format!("coordinate {x} is not on the grid lattice"));
            }
            Ok(j as i64)
        };
        let mut root_lo = [0; 3];
        let mut root_hi = [0; 3];
        for k in 0..td {
            root_lo[k] = to_lattice(k, self.root_bounds[k][0])?;
            root_hi[k] = to_lattice(k, self.root_bounds[k][1])?;
        }
        let mut grid = AmrVelocityGrid {
            coordinate_system: self.coordinate_system,
            lattice: lat,
            root_lo,
            root_hi,
            leaves: Vec::with_capacity(self.leaves.len()),
            mode: self.mode,
            points: Vec::with_capacity(self.points.len()),
            weights: self.weights,
            symmetry_pairing: None,
        };
        for (n, rec) in self.leaves.iter().enumerate() {
            if rec.center.len() != td || rec.half_width.len() != td {
                return Err(format!("leaf {n}: expected {td} components"));
            }
            let size = (2.0 * rec.half_width[0] / lat.step[0]).round() as i64;
            let mut lo = [0i64; 3];
            for k in 0..td {
                lo[k] = (((rec.center[k] - lat.mid[k]) / (0.5 * lat.step[k])).round() as i64 - size) / 2;
            }
            let leaf = Leaf {
                lo,
                size,
                level: rec.level,
            };
            if size <= 0
                || grid.leaf_center(&leaf)[..td] != rec.center[..]
                || grid.leaf_half_width(&leaf)[..td] != rec.half_width[..]
            {
                return Err(format!("leaf {n} does not match the lattice"));
            }
            grid.leaves.push(leaf);
        }
        let pd = grid.point_dim();
        for (n, p) in self.points.iter().enumerate() {
            if p.len() != pd {
                return Err(format!("point {n}: expected {pd} components, got {}", p.len()));
            }
            let mut v = [0.0; 3];
            v[..pd].copy_from_slice(p);
            grid.points.push(v);
        }
        // Validates weights and the pairing.
        let quad = Quadrature::new(pd, grid.points.clone(), grid.weights.clone())
            .and_then(|q| q.with_pairing(self.symmetry_pairing.clone()))
            .map_err(|e| e.to_string())?;
        grid.symmetry_pairing = quad.mirror().cloned();
        Ok(grid)
    }
}

pub fn write_grid(grid: &AmrVelocityGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(&GridFile::from_grid(grid)).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<AmrVelocityGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GridFile = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    file.into_grid()
        .map_err(|msg| Error::Structural(format!("{}: {msg}", path.display())))
}
