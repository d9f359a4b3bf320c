//! Steady discrete-velocity BGK solver on structured 2D meshes.

mod bc;
mod field;
mod implicit;
mod mesh;
mod transport;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bc::{side_faces, Boundaries, BoundaryCondition, BoundaryFace, Side, WallSigma};
pub use field::{DistributionField, GHOSTS};
pub use mesh::{BodyFrame, SpaceMesh2D};
pub use transport::{face_flux, minmod3, transport_divergence, TransportOrder};

use crate::equilibrium::{solve_into, EntropicVariable, EquilibriumJacobian, EquilibriumSummary, NewtonOptions};
use crate::error::{Error, Result};
use crate::kinetic::{
    moment_vector, primitive_from_conserved, relaxation_time, ConservedState, GasModel, PrimitiveState, MAX_MOMENTS,
};
use crate::linalg::Mat;
use crate::quadrature::Quadrature;
use crate::velocity::MacroField;
use bc::PreparedBc;
use implicit::LinearOperator;

pub const THREADS_ENV: &str = "RAREVEL_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// First time step, s. Defaults to the unit-CFL step of the finest cell.
    pub dt_initial: Option<f64>,
    pub dt_growth: f64,
    /// Cap on the time step as a multiple of the first one.
    pub dt_max_factor: f64,
    /// Jacobi passes per implicit step.
    pub inner_sweeps: usize,
    pub steady_tol: f64,
    pub max_outer: usize,
    pub limiter_enabled: bool,
    /// Halve the minmod correction.
    pub second_order_half_factor: bool,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Swap mesh directions so that lines are solved along the original `j`.
    pub transpose_mesh: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_initial: None,
            dt_growth: 1.05,
            dt_max_factor: 1e6,
            inner_sweeps: 3,
            steady_tol: 1e-8,
            max_outer: 5000,
            limiter_enabled: true,
            second_order_half_factor: false,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            transpose_mesh: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Validation(format!("solver config: {m}")));
        if let Some(dt) = self.dt_initial {
            if !(dt.is_finite() && dt > 0.0) {
                return bad("dt_initial must be positive");
            }
        }
        if !(self.dt_growth.is_finite() && self.dt_growth >= 1.0) {
            return bad("dt_growth must be >= 1");
        }
        if !(self.dt_max_factor.is_finite() && self.dt_max_factor >= 1.0) {
            return bad("dt_max_factor must be >= 1");
        }
        if self.inner_sweeps == 0 {
            return bad("inner_sweeps must be at least 1");
        }
        if !(self.steady_tol > 0.0) || self.max_outer == 0 {
            return bad("steady_tol and max_outer must be positive");
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return bad("Newton tolerance and iteration cap must be positive");
        }
        Ok(())
    }

    pub fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
        }
    }

    pub fn order(&self) -> TransportOrder {
        match (self.limiter_enabled, self.second_order_half_factor) {
            (false, _) => TransportOrder::First,
            (true, false) => TransportOrder::Second { factor: 1.0 },
            (true, true) => TransportOrder::Second { factor: 0.5 },
        }
    }
}

/// Initial data for [`run_to_steady`].
#[derive(Clone, Debug)]
pub enum Initialization {
    Uniform(PrimitiveState),
    Macro(MacroField),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub iter: usize,
    pub residual: f64,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualNorms {
    /// Dimensionless steady-state measure.
    pub scaled: f64,
    /// Root mean square of `|RHSf|` over cells and points.
    pub l2: f64,
    pub max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallFluxSample {
    pub side: Side,
    pub face: usize,
    pub x: f64,
    pub y: f64,
    pub theta_deg: f64,
    /// Net energy flux into the wall, W/m^2.
    pub q_n: f64,
}

#[derive(Clone, Debug)]
pub struct SteadySolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<ResidualRecord>,
    pub wall_flux: Vec<WallFluxSample>,
    /// `(min, max)` of the wall re-emission factor per iteration.
    pub sigma_history: Vec<(f64, f64)>,
    /// Largest number of negative `f` values seen after an update.
    pub max_negative_f: usize,
    /// Last tenth of the residual history never grows by more than 5% per step.
    pub monotone_tail: bool,
    pub macro_field: MacroField,
    pub wall_seconds: f64,
}

#[derive(Clone, Copy, Debug)]
struct ResidualScale {
    rho: f64,
    c: f64,
    time: f64,
}

/// Per-cell data of the linearized collision operator.
#[derive(Clone, Debug)]
pub struct CellLinearization<'a> {
    pub tau: f64,
    pub m: &'a [f64],
    pub n: &'a [f64],
    pub alpha: EntropicVariable,
    /// Physical moment Jacobian `dU/d alpha`.
    pub a_matrix: Mat,
}

fn build_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Validation(format!("{THREADS_ENV} must be a non-negative integer, got {s:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Structural(format!("thread pool: {e}")))
}

pub struct Solver {
    mesh: SpaceMesh2D,
    quad: Quadrature,
    gas: GasModel,
    bcs: Boundaries,
    config: SolverConfig,
    prepared: Vec<PreparedBc>,
    field: DistributionField,
    pool: rayon::ThreadPool,
    eq_m: Vec<f64>,
    eq_n: Vec<f64>,
    summaries: Vec<Option<EquilibriumSummary>>,
    tau: Vec<f64>,
    rhs_f: Vec<f64>,
    rhs_g: Vec<f64>,
    sigma: WallSigma,
    dt: f64,
    dt0: f64,
    iteration: usize,
    history: Vec<ResidualRecord>,
    scale: Option<ResidualScale>,
    assembled: bool,
}

impl Solver {
    pub fn new(
        mesh: SpaceMesh2D,
        quad: Quadrature,
        gas: GasModel,
        bcs: Boundaries,
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        gas.validate()?;
        if quad.dim() != gas.dv || quad.dim() < 2 {
            return Err(Error::Structural(format!(
                "a {}-d velocity grid cannot be used with a {}-d gas on a 2-d mesh",
                quad.dim(),
                gas.dv
            )));
        }
        let (mesh, bcs) = if config.transpose_mesh {
            (
                mesh.transposed()?,
                Boundaries {
                    i_min: bcs.j_min,
                    i_max: bcs.j_max,
                    j_min: bcs.i_min,
                    j_max: bcs.i_max,
                },
            )
        } else {
            (mesh, bcs)
        };
        let prepared = bc::prepare(&bcs, &quad, &gas, &config.newton())?;
        let (nc, nq) = (mesh.n_cells(), quad.len());
        let field = DistributionField::zeros(mesh.ni, mesh.nj, nq);
        let dt0 = match config.dt_initial {
            Some(dt) => dt,
            None => cfl_time_step(&mesh, &quad),
        };
        Ok(Solver {
            field,
            pool: build_pool()?,
            eq_m: vec![0.0; nc * nq],
            eq_n: vec![0.0; nc * nq],
            summaries: vec![None; nc],
            tau: vec![0.0; nc],
            rhs_f: vec![0.0; nc * nq],
            rhs_g: vec![0.0; nc * nq],
            sigma: Default::default(),
            dt: dt0,
            dt0,
            iteration: 0,
            history: Vec::new(),
            scale: None,
            assembled: false,
            mesh,
            quad,
            gas,
            bcs,
            config,
            prepared,
        })
    }

    pub fn mesh(&self) -> &SpaceMesh2D {
        &self.mesh
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    /// Replaces the interior values; ghosts are refilled on the next assembly.
    pub fn set_field(&mut self, field: DistributionField) -> Result<()> {
        if (field.ni, field.nj, field.nq) != (self.field.ni, self.field.nj, self.field.nq) {
            return Err(Error::Structural(
                "distribution field shape does not match the solver".into(),
            ));
        }
        self.field = field;
        self.assembled = false;
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn residual_history(&self) -> &[ResidualRecord] {
        &self.history
    }

    pub fn rhs(&self) -> (&[f64], &[f64]) {
        (&self.rhs_f, &self.rhs_g)
    }

    pub fn wall_sigma(&self) -> &WallSigma {
        &self.sigma
    }

    fn ensure_scale(&mut self, fallback: &[PrimitiveState]) {
        if self.scale.is_some() {
            return;
        }
        let inflow = Side::ALL.iter().find_map(|&s| match self.bcs.get(s) {
            BoundaryCondition::Inflow { state } => Some(*state),
            _ => None,
        });
        let reference = inflow.unwrap_or_else(|| {
            let n = fallback.len() as f64;
            let rho = fallback.iter().map(|p| p.rho).sum::<f64>() / n;
            let t = fallback.iter().map(|p| p.t).sum::<f64>() / n;
            PrimitiveState::new(rho, [0.0; 3], t)
        });
        let c = (self.gas.r * reference.t).sqrt().max(reference.speed());
        let area: f64 = self.mesh.volume.iter().sum();
        let h = (area / self.mesh.n_cells() as f64).sqrt();
        self.scale = Some(ResidualScale {
            rho: reference.rho,
            c,
            time: h / c,
        });
    }

    /// Sets every cell to the discrete equilibrium of `state`.
    pub fn initialize_uniform(&mut self, state: &PrimitiveState) -> Result<()> {
        let states = vec![*state; self.mesh.n_cells()];
        self.initialize_states(&states)
    }

    /// Sets each cell to the discrete equilibrium of a macroscopic field. A
    /// field with the mesh's shape maps cell by cell; otherwise each cell
    /// takes the state of the nearest field centroid.
    pub fn initialize_from_macro(&mut self, macro_field: &MacroField) -> Result<()> {
        let nc = self.mesh.n_cells();
        let direct = macro_field.len() == nc
            && (macro_field.dims.len() != 2
                || (self.config.transpose_mesh && macro_field.dims == [self.mesh.nj, self.mesh.ni])
                || (!self.config.transpose_mesh && macro_field.dims == [self.mesh.ni, self.mesh.nj]));
        let states: Vec<PrimitiveState> = if direct && !self.config.transpose_mesh {
            macro_field.cells.clone()
        } else if direct {
            // The field is stored in the original (untransposed) order.
            let (ni, nj) = (self.mesh.ni, self.mesh.nj);
            (0..nc).map(|c| macro_field.cells[(c % ni) * nj + c / ni]).collect()
        } else {
            let centroids = macro_field.centroids.as_ref().ok_or_else(|| {
                Error::Structural(format!(
                    "macro field with dims {:?} does not match the {}x{} mesh and has no centroids",
                    macro_field.dims, self.mesh.ni, self.mesh.nj
                ))
            })?;
            self.mesh
                .centroid
                .iter()
                .map(|x| {
                    let mut best = (f64::INFINITY, 0);
                    for (k, c) in centroids.iter().enumerate() {
                        let d = (c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2);
                        if d < best.0 {
                            best = (d, k);
                        }
                    }
                    macro_field.cells[best.1]
                })
                .collect()
        };
        self.initialize_states(&states)
    }

    fn initialize_states(&mut self, states: &[PrimitiveState]) -> Result<()> {
        let (ni, nq) = (self.mesh.ni, self.quad.len());
        let (quad, gas, opts) = (&self.quad, &self.gas, self.config.newton());
        let mut f = vec![0.0; states.len() * nq];
        let mut g = vec![0.0; states.len() * nq];
        let summaries: Vec<EquilibriumSummary> = self.pool.install(|| {
            f.par_chunks_mut(nq)
                .zip(g.par_chunks_mut(nq))
                .zip(states.par_iter())
                .enumerate()
                .map(|(c, ((fc, gc), p))| {
                    p.validate()
                        .and_then(|_| {
                            let u = ConservedState::from_primitive(p, gas).to_vector(gas.dv);
                            solve_into(&u, quad, gas, &opts, None, fc, gc)
                        })
                        .map_err(|e| e.in_cell(c % ni, c / ni))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (c, (fc, gc)) in f.chunks(nq).zip(g.chunks(nq)).enumerate() {
            let (i, j) = ((c % ni) as isize, (c / ni) as isize);
            self.field.f_at_mut(i, j).copy_from_slice(fc);
            self.field.g_at_mut(i, j).copy_from_slice(gc);
        }
        self.summaries = summaries.into_iter().map(Some).collect();
        self.ensure_scale(states);
        self.assembled = false;
        Ok(())
    }

    /// Fills ghosts, solves the local equilibria and evaluates
    /// `RHS = -div + (M - f)/tau` (and the `g` analogue).
    pub fn assemble_rhs(&mut self) -> Result<ResidualNorms> {
        if self.scale.is_none() {
            return Err(Error::Structural("solver used before initialization".into()));
        }
        self.sigma = bc::fill_ghosts(&mut self.field, &self.mesh, &self.quad, &self.prepared)?;
        let (ni, nq) = (self.mesh.ni, self.quad.len());
        let order = self.config.order();
        let opts = self.config.newton();
        let Solver {
            field,
            mesh,
            quad,
            gas,
            eq_m,
            eq_n,
            summaries,
            tau,
            rhs_f,
            rhs_g,
            pool,
            ..
        } = self;
        pool.install(|| -> Result<()> {
            transport_divergence(field, mesh, quad, order, rhs_f, rhs_g);
            let field = &*field;
            eq_m.par_chunks_mut(nq)
                .zip(eq_n.par_chunks_mut(nq))
                .zip(summaries.par_iter_mut())
                .zip(tau.par_iter_mut())
                .zip(rhs_f.par_chunks_mut(nq))
                .zip(rhs_g.par_chunks_mut(nq))
                .enumerate()
                .try_for_each(|(c, (((((m, n), summary), tau), rf), rg))| {
                    let (i, j) = (c % ni, c / ni);
                    let (fc, gc) = (field.f_at(i as isize, j as isize), field.g_at(i as isize, j as isize));
                    let u = moment_vector(fc, gc, quad);
                    let prim = primitive_from_conserved(&ConservedState::from_vector(&u, gas.dv), gas)
                        .map_err(|e| e.in_cell(i, j))?;
                    let warm = summary.as_ref().map(|s| s.alpha);
                    let s = solve_into(&u, quad, gas, &opts, warm.as_ref(), m, n).map_err(|e| e.in_cell(i, j))?;
                    *summary = Some(s);
                    *tau = relaxation_time(&prim, gas);
                    let it = 1.0 / *tau;
                    for q in 0..nq {
                        rf[q] = -rf[q] + it * (m[q] - fc[q]);
                        rg[q] = -rg[q] + it * (n[q] - gc[q]);
                    }
                    Ok(())
                })
        })?;
        self.assembled = true;
        Ok(self.residual_norms())
    }

    fn residual_norms(&self) -> ResidualNorms {
        let scale = self.scale.expect("initialized");
        let (nc, nq, dim) = (self.mesh.n_cells(), self.quad.len(), self.quad.dim());
        let mut sums = [0.0; MAX_MOMENTS];
        let mut l2 = 0.0;
        let mut max = 0.0f64;
        for c in 0..nc {
            let mut r = [0.0; MAX_MOMENTS];
            for q in 0..nq {
                let af = self.rhs_f[c * nq + q].abs();
                let ag = self.rhs_g[c * nq + q].abs();
                let w = self.quad.weights[q];
                let v = &self.quad.points[q];
                r[0] += af * w;
                for k in 0..dim {
                    r[k + 1] += v[k].abs() * af * w;
                }
                r[dim + 1] += (self.quad.half_v2[q] * af + ag) * w;
                l2 += af * af;
                max = max.max(af);
            }
            for k in 0..dim + 2 {
                sums[k] += r[k] * r[k];
            }
        }
        let mut scaled = 0.0f64;
        for (k, s) in sums.iter().enumerate().take(dim + 2) {
            let unit = if k == 0 {
                scale.rho
            } else if k <= dim {
                scale.rho * scale.c
            } else {
                scale.rho * scale.c * scale.c
            };
            scaled = scaled.max((s / nc as f64).sqrt() * scale.time / unit);
        }
        ResidualNorms {
            scaled,
            l2: (l2 / (nc * nq) as f64).sqrt(),
            max,
        }
    }

    fn jacobians(&self) -> Vec<EquilibriumJacobian> {
        let dim = self.gas.dv;
        self.summaries
            .iter()
            .map(|s| EquilibriumJacobian::new(s.as_ref().expect("assembled"), dim))
            .collect()
    }

    fn require_assembled(&self) -> Result<()> {
        if self.assembled {
            Ok(())
        } else {
            Err(Error::Structural("the right-hand side has not been assembled".into()))
        }
    }

    /// Linearization data of cell `c` at the last assembly.
    pub fn cell_linearization(&self, c: usize) -> Result<CellLinearization<'_>> {
        self.require_assembled()?;
        let nq = self.quad.len();
        let s = self.summaries[c].as_ref().expect("assembled");
        Ok(CellLinearization {
            tau: self.tau[c],
            m: &self.eq_m[c * nq..(c + 1) * nq],
            n: &self.eq_n[c * nq..(c + 1) * nq],
            alpha: s.alpha,
            a_matrix: EquilibriumJacobian::new(s, self.gas.dv).a_matrix(),
        })
    }

    /// Approximately solves `(I/dt + T + R) dF = rhs` with `passes` Jacobi
    /// passes of forward and backward line sweeps. Cell-major layout.
    pub fn solve_linear(&self, rhs_f: &[f64], rhs_g: &[f64], passes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.require_assembled()?;
        let len = self.mesh.n_cells() * self.quad.len();
        if rhs_f.len() != len || rhs_g.len() != len {
            return Err(Error::Structural(format!("right-hand side must hold {len} values")));
        }
        let jac = self.jacobians();
        let inv_tau: Vec<f64> = self.tau.iter().map(|t| 1.0 / t).collect();
        self.pool.install(|| {
            LinearOperator::new(&self.mesh, &self.quad, &jac, &inv_tau, self.dt, &self.eq_m, &self.eq_n)
                .solve(rhs_f, rhs_g, passes)
        })
    }

    /// Applies `I/dt + T + R` to a cell-major increment.
    pub fn apply_linear_operator(&self, df: &[f64], dg: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.require_assembled()?;
        let jac = self.jacobians();
        let inv_tau: Vec<f64> = self.tau.iter().map(|t| 1.0 / t).collect();
        Ok(self.pool.install(|| {
            LinearOperator::new(&self.mesh, &self.quad, &jac, &inv_tau, self.dt, &self.eq_m, &self.eq_n).apply(df, dg)
        }))
    }

    fn update(&mut self) -> Result<()> {
        let (df, dg) = self.solve_linear(&self.rhs_f, &self.rhs_g, self.config.inner_sweeps)?;
        if !df.iter().chain(&dg).all(|x| x.is_finite()) {
            return Err(Error::Divergence {
                iteration: self.iteration,
                msg: "non-finite increment".into(),
            });
        }
        let (ni, nq) = (self.mesh.ni, self.quad.len());
        for c in 0..self.mesh.n_cells() {
            let (i, j) = ((c % ni) as isize, (c / ni) as isize);
            let o = self.field.offset(i, j);
            for q in 0..nq {
                self.field.f[o + q] += df[c * nq + q];
                self.field.g[o + q] += dg[c * nq + q];
            }
        }
        self.assembled = false;
        Ok(())
    }

    fn record(&mut self, norms: &ResidualNorms) -> Result<()> {
        if !norms.scaled.is_finite() {
            return Err(Error::Divergence {
                iteration: self.iteration,
                msg: "non-finite residual".into(),
            });
        }
        self.history.push(ResidualRecord {
            iter: self.iteration,
            residual: norms.scaled,
            dt: self.dt,
        });
        Ok(())
    }

    fn grow_dt(&mut self) {
        self.dt = (self.dt * self.config.dt_growth).min(self.dt0 * self.config.dt_max_factor);
    }

    /// One outer iteration. Returns `true` without updating when the
    /// assembled residual is already below `steady_tol`.
    pub fn step(&mut self) -> Result<bool> {
        self.iteration += 1;
        let norms = self.assemble_rhs()?;
        self.record(&norms)?;
        if norms.scaled <= self.config.steady_tol {
            return Ok(true);
        }
        self.update()?;
        self.grow_dt();
        Ok(false)
    }

    /// One outer iteration that always applies the increment.
    pub fn advance(&mut self) -> Result<ResidualNorms> {
        self.iteration += 1;
        let norms = self.assemble_rhs()?;
        self.record(&norms)?;
        self.update()?;
        self.grow_dt();
        Ok(norms)
    }

    /// Net energy flux into every diffuse-wall face, W/m^2.
    pub fn wall_heat_flux(&mut self) -> Result<Vec<WallFluxSample>> {
        if !self.bcs.has_wall() {
            return Err(Error::Structural("no diffuse wall in the boundary conditions".into()));
        }
        self.sigma = bc::fill_ghosts(&mut self.field, &self.mesh, &self.quad, &self.prepared)?;
        let mut out = Vec::new();
        for side in Side::ALL {
            if !matches!(self.bcs.get(side), BoundaryCondition::DiffuseWall { .. }) {
                continue;
            }
            for (k, bf) in side_faces(&self.mesh, side).iter().enumerate() {
                let (f1, g1) = (
                    self.field.f_at(bf.cell1.0, bf.cell1.1),
                    self.field.g_at(bf.cell1.0, bf.cell1.1),
                );
                let (fw, gw) = (
                    self.field.f_at(bf.ghost1.0, bf.ghost1.1),
                    self.field.g_at(bf.ghost1.0, bf.ghost1.1),
                );
                let mut e = 0.0;
                for q in 0..self.quad.len() {
                    let v = &self.quad.points[q];
                    let a = v[0] * bf.normal_out[0] + v[1] * bf.normal_out[1];
                    let (f, g) = if a > 0.0 { (f1[q], g1[q]) } else { (fw[q], gw[q]) };
                    e += (self.quad.half_v2[q] * f + g) * a * self.quad.weights[q];
                }
                out.push(WallFluxSample {
                    side,
                    face: k,
                    x: bf.midpoint[0],
                    y: bf.midpoint[1],
                    theta_deg: self.mesh.body.theta_deg(bf.midpoint),
                    q_n: e / bf.length(),
                });
            }
        }
        Ok(out)
    }

    /// Cell states of the current interior field, with centroids.
    pub fn macro_field(&self) -> Result<MacroField> {
        let ni = self.mesh.ni;
        let cells = (0..self.mesh.n_cells())
            .map(|c| {
                let (i, j) = (c % ni, c / ni);
                let u = moment_vector(
                    self.field.f_at(i as isize, j as isize),
                    self.field.g_at(i as isize, j as isize),
                    &self.quad,
                );
                primitive_from_conserved(&ConservedState::from_vector(&u, self.gas.dv), &self.gas)
                    .map_err(|e| e.in_cell(i, j))
            })
            .collect::<Result<Vec<_>>>()?;
        let centroids = self.mesh.centroid.iter().map(|c| [c[0], c[1], 0.0]).collect();
        MacroField::new(vec![self.mesh.ni, self.mesh.nj], cells, Some(centroids), self.gas.dv)
    }
}

/// `min over cells and points of |Omega| / sum_faces |v . nu|`.
pub fn cfl_time_step(mesh: &SpaceMesh2D, quad: &Quadrature) -> f64 {
    let mut dt = f64::INFINITY;
    for j in 0..mesh.nj {
        for i in 0..mesh.ni {
            let nrm = mesh.outward_normals(i, j);
            let vol = mesh.volume[mesh.cell(i, j)];
            for v in &quad.points {
                let s: f64 = nrm.iter().map(|n| (v[0] * n[0] + v[1] * n[1]).abs()).sum();
                if s > 0.0 {
                    dt = dt.min(vol / s);
                }
            }
        }
    }
    dt
}

fn monotone_tail(history: &[ResidualRecord]) -> bool {
    let n = history.len();
    let start = n - (n / 10).max(1).min(n);
    history[start..]
        .windows(2)
        .all(|w| w[1].residual <= 1.05 * w[0].residual)
}

/// Iterates to a steady state. Non-convergence is reported through
/// `converged = false`; numerical failures are errors.
pub fn run_to_steady(
    mesh: SpaceMesh2D,
    quad: Quadrature,
    gas: GasModel,
    bcs: Boundaries,
    init: &Initialization,
    config: SolverConfig,
) -> Result<SteadySolveReport> {
    let start = Instant::now();
    let mut solver = Solver::new(mesh, quad, gas, bcs, config)?;
    match init {
        Initialization::Uniform(p) => solver.initialize_uniform(p)?,
        Initialization::Macro(m) => solver.initialize_from_macro(m)?,
    }
    let mut converged = false;
    let mut sigma_history = Vec::new();
    let mut max_negative_f = 0;
    while solver.iteration() < solver.config.max_outer {
        converged = solver.step()?;
        let (lo, hi) = solver
            .sigma
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
        sigma_history.push((lo, hi));
        max_negative_f = max_negative_f.max(solver.field.negative_count());
        if converged {
            break;
        }
    }
    let wall_flux = if solver.bcs.has_wall() {
        solver.wall_heat_flux()?
    } else {
        Vec::new()
    };
    Ok(SteadySolveReport {
        converged,
        iterations: solver.iteration(),
        monotone_tail: monotone_tail(&solver.history),
        residual_history: solver.history.clone(),
        wall_flux,
        sigma_history,
        max_negative_f,
        macro_field: solver.macro_field()?,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
