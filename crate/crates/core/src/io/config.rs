//! JSON run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{GasModel, PrimitiveState};
use crate::solver::{BodyFrame, Boundaries, BoundaryCondition, Side, SolverConfig, SpaceMesh2D};
use crate::velocity::{CoordinateSystem, GridParams, QuadratureMode, DEFAULT_MAX_LEVEL};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub gas: GasModel,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverConfig,
    pub case: CaseSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateKind {
    Cartesian,
    Cylindrical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub c: f64,
    pub a: f64,
    pub mode: QuadratureMode,
    pub extend_for_p0: bool,
    pub coordinates: CoordinateKind,
    pub n_omega: usize,
    /// Wall temperature for the support function, K.
    pub wall_t: Option<f64>,
    pub max_level: u32,
    /// Mirror the grid about `v_axis = 0` after generation.
    pub symmetry_axis: Option<usize>,
    /// Velocity grid used by `solve` when none is given on the command line.
    pub file: Option<PathBuf>,
}

impl Default for GridSection {
    fn default() -> Self {
        let p = GridParams::default();
        GridSection {
            c: p.c,
            a: p.a,
            mode: p.mode,
            extend_for_p0: p.extend_for_p0,
            coordinates: CoordinateKind::Cartesian,
            n_omega: p.n_omega,
            wall_t: None,
            max_level: DEFAULT_MAX_LEVEL,
            symmetry_axis: None,
            file: None,
        }
    }
}

impl GridSection {
    pub fn params(&self) -> GridParams {
        GridParams {
            c: self.c,
            a: self.a,
            mode: self.mode,
            extend_for_p0: self.extend_for_p0,
            n_omega: self.n_omega,
            wall_t: self.wall_t,
            max_level: self.max_level,
        }
    }

    pub fn coordinate_system(&self, gas: &GasModel) -> CoordinateSystem {
        match self.coordinates {
            CoordinateKind::Cartesian => CoordinateSystem::Cartesian { dim: gas.dv },
            CoordinateKind::Cylindrical => CoordinateSystem::Cylindrical { n_omega: self.n_omega },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) || !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::Validation(format!(
                "grid: c and a must be positive, got c={} a={}",
                self.c, self.a
            )));
        }
        if self.coordinates == CoordinateKind::Cylindrical && self.n_omega == 0 {
            return Err(Error::Validation("grid: n_omega must be positive".into()));
        }
        if let Some(t) = self.wall_t {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Validation(format!("grid: wall_t must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    AnnulusSector {
        r_inner: f64,
        r_outer: f64,
        ni: usize,
        nj: usize,
        /// Wall-normal size of the first cell; uniform spacing when absent.
        first_cell: Option<f64>,
        sector_deg: f64,
    },
    Channel {
        length: f64,
        y0: f64,
        y1: f64,
        ni: usize,
        nj: usize,
    },
    File {
        path: PathBuf,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<SpaceMesh2D> {
        match self {
            MeshSpec::AnnulusSector {
                r_inner,
                r_outer,
                ni,
                nj,
                first_cell,
                sector_deg,
            } => SpaceMesh2D::annulus_sector(*r_inner, *r_outer, *ni, *nj, *first_cell, *sector_deg),
            MeshSpec::Channel { length, y0, y1, ni, nj } => SpaceMesh2D::channel(*length, *y0, *y1, *ni, *nj),
            MeshSpec::File { path } => SpaceMesh2D::load(path),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    /// Uniform state of the first inflow boundary.
    Upstream,
    MacroFile(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub mesh: MeshSpec,
    pub boundaries: Boundaries,
    #[serde(default = "default_init")]
    pub init: InitSpec,
    /// Body center and stagnation direction for wall angles.
    #[serde(default)]
    pub body: Option<BodyFrame>,
}

fn default_init() -> InitSpec {
    InitSpec::Upstream
}

impl CaseSection {
    pub fn upstream_state(&self) -> Option<PrimitiveState> {
        Side::ALL.iter().find_map(|&s| match self.boundaries.get(s) {
            BoundaryCondition::Inflow { state } => Some(*state),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub vtk: Option<PathBuf>,
    pub fields: Option<PathBuf>,
    pub wall_flux: Option<PathBuf>,
    pub residual: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("."),
            vtk: Some(PathBuf::from("fields.vtk")),
            fields: Some(PathBuf::from("fields.dat")),
            wall_flux: Some(PathBuf::from("wall_flux.csv")),
            residual: Some(PathBuf::from("residual.csv")),
        }
    }
}

impl OutputSection {
    /// Resolved output paths, in the order vtk, fields, wall flux, residual.
    pub fn paths(&self) -> [Option<PathBuf>; 4] {
        [&self.vtk, &self.fields, &self.wall_flux, &self.residual].map(|p| p.as_ref().map(|p| self.dir.join(p)))
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn require_file(p: &Path, what: &str) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} {} does not exist", p.display())))
    }
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json(path, e))
    }

    /// Reads, resolves relative paths against the file's directory and validates.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.grid.file {
            resolve(base, p);
        }
        if let MeshSpec::File { path } = &mut self.case.mesh {
            resolve(base, path);
        }
        if let InitSpec::MacroFile(p) = &mut self.case.init {
            resolve(base, p);
        }
        resolve(base, &mut self.output.dir);
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        self.gas.validate()?;
        self.grid.validate()?;
        self.solver.validate()?;
        for side in Side::ALL {
            self.case.boundaries.get(side).validate()?;
        }
        if let MeshSpec::File { path } = &self.case.mesh {
            require_file(path, "mesh file")?;
        }
        match &self.case.init {
            InitSpec::MacroFile(p) => require_file(p, "macro-field file")?,
            InitSpec::Upstream if self.case.upstream_state().is_none() => {
                return Err(Error::Validation("init `upstream` needs an inflow boundary".into()))
            }
            InitSpec::Upstream => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
