//! End-to-end drivers: fields to velocity grid, configuration to steady solution.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::config::{CoordinateKind, GridSection, InitSpec, RunConfig};
use crate::io::tables::{write_flux_csv, write_residual_csv};
use crate::io::vtk::write_vtk;
use crate::kinetic::GasModel;
use crate::quadrature::Quadrature;
use crate::solver::{run_to_steady, Initialization, SpaceMesh2D, SteadySolveReport};
use crate::velocity::{
    attach_quadrature, build_cartesian_grid, generate_axisym_grid, read_grid, symmetrize_grid, uniform_grid,
    AmrVelocityGrid, CoordinateSystem, GridBuild, MacroField,
};

pub fn load_macro_fields(path: impl AsRef<Path>) -> Result<MacroField> {
    MacroField::load(path)
}

/// Point counts and cell sizes of a generated grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSummary {
    pub fine_points: usize,
    pub fine_shape: [usize; 3],
    pub fine_dv: f64,
    pub points: usize,
    pub leaves: usize,
    pub min_cell: f64,
    pub max_cell: f64,
}

impl GridSummary {
    pub fn reduction(&self) -> f64 {
        self.fine_points as f64 / self.points as f64
    }
}

impl fmt::Display for GridSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape: Vec<String> = self
            .fine_shape
            .iter()
            .filter(|&&n| n > 1)
            .map(|n| n.to_string())
            .collect();
        writeln!(f, "{:<22}{:>14}", "fine grid points", self.fine_points)?;
        writeln!(f, "{:<22}{:>14}", "fine grid shape", shape.join(" x "))?;
        writeln!(f, "{:<22}{:>14.4}", "fine spacing (m/s)", self.fine_dv)?;
        writeln!(f, "{:<22}{:>14}", "grid points", self.points)?;
        writeln!(f, "{:<22}{:>14}", "leaves", self.leaves)?;
        writeln!(f, "{:<22}{:>14.3}", "reduction factor", self.reduction())?;
        writeln!(f, "{:<22}{:>14.4}", "min cell size (m/s)", self.min_cell)?;
        write!(f, "{:<22}{:>14.4}", "max cell size (m/s)", self.max_cell)
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedGrid {
    pub build: GridBuild,
    /// The grid to use: adaptive or uniform, mirrored when requested.
    pub grid: AmrVelocityGrid,
    pub summary: GridSummary,
}

/// Fine spec, support function, refinement, quadrature and the optional
/// mirroring. With `uniform` the fine grid itself is returned (its Q1 rule
/// is the trapezoidal rule on the fine nodes).
pub fn generate_grid(
    field: &MacroField,
    gas: &GasModel,
    section: &GridSection,
    uniform: bool,
) -> Result<GeneratedGrid> {
    section.validate()?;
    let params = section.params();
    let mut build = match section.coordinates {
        CoordinateKind::Cartesian => {
            let field = match section.symmetry_axis {
                Some(axis) if axis < gas.dv => field.mirrored(axis),
                Some(axis) => {
                    return Err(Error::Validation(format!(
                        "symmetry axis {axis} outside {}-d velocities",
                        gas.dv
                    )))
                }
                None => field.clone(),
            };
            build_cartesian_grid(&field, gas.r, gas.dv, &params)?
        }
        CoordinateKind::Cylindrical => {
            if section.symmetry_axis.is_some() {
                return Err(Error::Validation("cylindrical grids take no symmetry axis".into()));
            }
            generate_axisym_grid(field, gas.r, &params)?
        }
    };
    let mut grid = if uniform {
        // A mirrored uniform grid needs a node on the plane: even step count.
        if let Some(axis) = section.symmetry_axis {
            if build.spec.steps(axis) % 2 == 1 {
                let half = 0.5 * build.spec.dv;
                build.spec.v_min[axis] -= half;
                build.spec.v_max[axis] += half;
                build.spec.n[axis] += 1;
            }
        }
        attach_quadrature(uniform_grid(&build.spec, build.grid.coordinate_system), params.mode)
    } else {
        build.grid.clone()
    };
    if let Some(axis) = section.symmetry_axis {
        grid = symmetrize_grid(&grid, axis)?;
    }
    let (min_cell, max_cell) = grid.edge_range();
    let mut fine_shape = [1; 3];
    for (k, n) in fine_shape.iter_mut().enumerate().take(build.spec.dim()) {
        *n = build.spec.steps(k) + 1;
    }
    let summary = GridSummary {
        fine_points: build.fine_points(),
        fine_shape,
        fine_dv: build.spec.dv,
        points: grid.len(),
        leaves: grid.leaves.len(),
        min_cell,
        max_cell,
    };
    Ok(GeneratedGrid { build, grid, summary })
}

/// Solver quadrature of a grid file, rejecting grids the planar solver cannot use.
pub fn solver_quadrature(grid: &AmrVelocityGrid, gas: &GasModel) -> Result<Quadrature> {
    match grid.coordinate_system {
        CoordinateSystem::Cartesian { dim } if dim == gas.dv => grid.quadrature(),
        CoordinateSystem::Cartesian { dim } => Err(Error::Validation(format!(
            "{dim}-d velocity grid for a gas with {} velocity components",
            gas.dv
        ))),
        CoordinateSystem::Cylindrical { .. } => Err(Error::Validation(
            "cylindrical velocity grids are not supported by the planar solver".into(),
        )),
    }
}

/// A fully validated solve: everything is loaded before any output is written.
#[derive(Clone, Debug)]
pub struct SolveJob {
    pub config: RunConfig,
    pub mesh: SpaceMesh2D,
    pub quadrature: Quadrature,
    pub init: Initialization,
}

impl SolveJob {
    /// `grid_path` overrides `config.grid.file`; `init` overrides `config.case.init`.
    pub fn prepare(config: RunConfig, grid_path: Option<&Path>, init: Option<InitSpec>) -> Result<Self> {
        let mut config = config;
        if let Some(i) = init {
            config.case.init = i;
        }
        config.validate()?;
        let grid_path: PathBuf = match (grid_path, &config.grid.file) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => p.clone(),
            (None, None) => return Err(Error::Validation("no velocity grid file given".into())),
        };
        if !grid_path.is_file() {
            return Err(Error::Validation(format!(
                "grid file {} does not exist",
                grid_path.display()
            )));
        }
        let grid = read_grid(&grid_path)?;
        let quadrature = solver_quadrature(&grid, &config.gas)?;
        let mut mesh = config.case.mesh.build()?;
        if let Some(b) = config.case.body {
            mesh.body = b;
        }
        let init = match &config.case.init {
            InitSpec::Upstream => Initialization::Uniform(
                config
                    .case
                    .upstream_state()
                    .ok_or_else(|| Error::Validation("init `upstream` needs an inflow boundary".into()))?,
            ),
            InitSpec::MacroFile(p) => Initialization::Macro(load_macro_fields(p)?),
        };
        Ok(SolveJob {
            config,
            mesh,
            quadrature,
            init,
        })
    }

    pub fn run(self) -> Result<SteadySolveReport> {
        let c = self.config;
        run_to_steady(
            self.mesh,
            self.quadrature,
            c.gas,
            c.case.boundaries,
            &self.init,
            c.solver,
        )
    }
}

/// Writes the configured result files and returns their paths.
pub fn write_outputs(report: &SteadySolveReport, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = &config.output;
    std::fs::create_dir_all(&out.dir).map_err(|e| Error::io(&out.dir, e))?;
    let [vtk, fields, flux, residual] = out.paths();
    let mut written = Vec::new();
    if let Some(p) = vtk {
        write_vtk(&report.macro_field, &config.gas, &p)?;
        written.push(p);
    }
    if let Some(p) = fields {
        report.macro_field.save(&p)?;
        written.push(p);
    }
    if let Some(p) = flux {
        if !report.wall_flux.is_empty() {
            write_flux_csv(&report.wall_flux, &p)?;
            written.push(p);
        }
    }
    if let Some(p) = residual {
        write_residual_csv(&report.residual_history, &p)?;
        written.push(p);
    }
    Ok(written)
}
