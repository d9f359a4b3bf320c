//! C interface to the `rarevel` library.
//!
//! Objects cross the boundary as opaque handles created by `rv_*_load`,
//! `rv_*_generate` or `rv_solve` and released with the matching `rv_*_free`.
//! Every fallible call returns an [`RvStatus`]; the message of the last
//! failure on the calling thread is available from [`rv_last_error`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use rarevel::equilibrium::{solve_discrete_equilibrium, NewtonOptions};
use rarevel::io::{generate_grid, solver_quadrature, GridSection, RunConfig, SolveJob};
use rarevel::kinetic::{ConservedState, GasModel, PrimitiveState};
use rarevel::solver::SteadySolveReport;
use rarevel::velocity::{normal_shock_ratios, read_grid, write_grid, AmrVelocityGrid, MacroField, QuadratureMode};
use rarevel::{Error, ErrorKind};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RvStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    NonConvergence = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RvMode {
    Q1 = 0,
    P0 = 1,
}

/// Gas parameters, SI units.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RvGas {
    pub r: f64,
    pub mu_ref: f64,
    pub t_ref: f64,
    pub omega_visc: f64,
    pub delta: u32,
    pub dv: u32,
}

/// Density (kg/m^3), velocity (m/s) and temperature (K).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RvState {
    pub rho: f64,
    pub u: [f64; 3],
    pub t: f64,
}

pub struct RvField {
    inner: MacroField,
}

pub struct RvGrid {
    inner: AmrVelocityGrid,
}

pub struct RvReport {
    inner: SteadySolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RvStatus {
    match e.kind() {
        ErrorKind::Input => RvStatus::Input,
        ErrorKind::NonConvergence => RvStatus::NonConvergence,
        ErrorKind::Numerical => RvStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<RvStatus, (RvStatus, String)>) -> RvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RvStatus::Panic
        }
    }
}

fn lift(e: Error) -> (RvStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RvStatus, String) {
    (RvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, (RvStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| (RvStatus::Input, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (RvStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

fn gas_of(g: &RvGas) -> Result<GasModel, (RvStatus, String)> {
    GasModel::new(g.r, g.mu_ref, g.t_ref, g.omega_visc, g.delta, g.dv as usize).map_err(lift)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Argon with `dv` discrete velocity components.
#[no_mangle]
pub unsafe extern "C" fn rv_gas_argon(dv: u32, out: *mut RvGas) -> RvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = GasModel::argon(dv as usize);
        g.validate().map_err(lift)?;
        *out = RvGas {
            r: g.r,
            mu_ref: g.mu_ref,
            t_ref: g.t_ref,
            omega_visc: g.omega_visc,
            delta: g.delta,
            dv,
        };
        Ok(RvStatus::Ok)
    })
}

/// Density, velocity and temperature ratios across a normal shock.
#[no_mangle]
pub unsafe extern "C" fn rv_normal_shock(
    gamma: f64,
    mach: f64,
    rho_ratio: *mut f64,
    u_ratio: *mut f64,
    t_ratio: *mut f64,
) -> RvStatus {
    guard(|| {
        let (r, u, t) = (
            out_arg(rho_ratio, "rho_ratio")?,
            out_arg(u_ratio, "u_ratio")?,
            out_arg(t_ratio, "t_ratio")?,
        );
        let (a, b, c) = normal_shock_ratios(gamma, mach).map_err(lift)?;
        (*r, *u, *t) = (a, b, c);
        Ok(RvStatus::Ok)
    })
}

/// Reads a macroscopic field file.
#[no_mangle]
pub unsafe extern "C" fn rv_field_load(path: *const c_char, out: *mut *mut RvField) -> RvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = path_arg(path, "path")?;
        let inner = MacroField::load(&p).map_err(lift)?;
        *out = Box::into_raw(Box::new(RvField { inner }));
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_field_cell_count(field: *const RvField, out: *mut usize) -> RvStatus {
    guard(|| {
        *out_arg(out, "out")? = in_arg(field, "field")?.inner.len();
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_field_free(field: *mut RvField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Adaptive grid for `field`. `symmetry_axis < 0` disables mirroring.
#[no_mangle]
pub unsafe extern "C" fn rv_grid_generate(
    field: *const RvField,
    gas: *const RvGas,
    c: f64,
    a: f64,
    mode: RvMode,
    symmetry_axis: i32,
    out: *mut *mut RvGrid,
) -> RvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let field = in_arg(field, "field")?;
        let gas = gas_of(in_arg(gas, "gas")?)?;
        let section = GridSection {
            c,
            a,
            mode: match mode {
                RvMode::Q1 => QuadratureMode::Q1,
                RvMode::P0 => QuadratureMode::P0,
            },
            symmetry_axis: usize::try_from(symmetry_axis).ok(),
            ..Default::default()
        };
        let g = generate_grid(&field.inner, &gas, &section, false).map_err(lift)?;
        *out = Box::into_raw(Box::new(RvGrid { inner: g.grid }));
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_grid_load(path: *const c_char, out: *mut *mut RvGrid) -> RvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = path_arg(path, "path")?;
        let inner = read_grid(&p).map_err(lift)?;
        *out = Box::into_raw(Box::new(RvGrid { inner }));
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_grid_save(grid: *const RvGrid, path: *const c_char) -> RvStatus {
    guard(|| {
        let g = in_arg(grid, "grid")?;
        let p = path_arg(path, "path")?;
        write_grid(&g.inner, &p).map_err(lift)?;
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_grid_point_count(grid: *const RvGrid, out: *mut usize) -> RvStatus {
    guard(|| {
        *out_arg(out, "out")? = in_arg(grid, "grid")?.inner.len();
        Ok(RvStatus::Ok)
    })
}

/// Copies the quadrature: `points` holds `3 * len` coordinates, `weights` `len` values.
#[no_mangle]
pub unsafe extern "C" fn rv_grid_quadrature(
    grid: *const RvGrid,
    points: *mut f64,
    weights: *mut f64,
    len: usize,
) -> RvStatus {
    guard(|| {
        let g = &in_arg(grid, "grid")?.inner;
        if points.is_null() || weights.is_null() {
            return Err(null("output buffer"));
        }
        if len != g.len() {
            return Err((
                RvStatus::Input,
                format!("buffer holds {len} points, grid has {}", g.len()),
            ));
        }
        let p = std::slice::from_raw_parts_mut(points, 3 * len);
        let w = std::slice::from_raw_parts_mut(weights, len);
        for (k, x) in g.points.iter().enumerate() {
            p[3 * k..3 * k + 3].copy_from_slice(x);
        }
        w.copy_from_slice(&g.weights);
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_grid_free(grid: *mut RvGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Discrete equilibrium `(M, N)` of `state` on `grid`; both buffers hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn rv_equilibrium(
    grid: *const RvGrid,
    gas: *const RvGas,
    state: *const RvState,
    m: *mut f64,
    n: *mut f64,
    len: usize,
) -> RvStatus {
    guard(|| {
        let g = &in_arg(grid, "grid")?.inner;
        let gas = gas_of(in_arg(gas, "gas")?)?;
        let s = in_arg(state, "state")?;
        if m.is_null() || n.is_null() {
            return Err(null("output buffer"));
        }
        if len != g.len() {
            return Err((
                RvStatus::Input,
                format!("buffer holds {len} points, grid has {}", g.len()),
            ));
        }
        let quad = solver_quadrature(g, &gas).map_err(lift)?;
        let p = PrimitiveState::new(s.rho, s.u, s.t);
        p.validate().map_err(lift)?;
        let eq = solve_discrete_equilibrium(
            &ConservedState::from_primitive(&p, &gas),
            &quad,
            &gas,
            &NewtonOptions::default(),
        )
        .map_err(lift)?;
        std::slice::from_raw_parts_mut(m, len).copy_from_slice(&eq.m);
        std::slice::from_raw_parts_mut(n, len).copy_from_slice(&eq.n);
        Ok(RvStatus::Ok)
    })
}

/// Runs a steady solve from a configuration file. `grid_path` may be null to
/// use the grid named in the configuration. A report is returned both on
/// convergence (`RV_STATUS_OK`) and when the iteration cap is reached
/// (`RV_STATUS_NON_CONVERGENCE`). No files are written.
#[no_mangle]
pub unsafe extern "C" fn rv_solve(
    config_path: *const c_char,
    grid_path: *const c_char,
    out: *mut *mut RvReport,
) -> RvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg_path = path_arg(config_path, "config_path")?;
        let grid = if grid_path.is_null() {
            None
        } else {
            Some(path_arg(grid_path, "grid_path")?)
        };
        let cfg = RunConfig::load(&cfg_path).map_err(lift)?;
        let job = SolveJob::prepare(cfg, grid.as_deref(), None).map_err(lift)?;
        let report = job.run().map_err(lift)?;
        let converged = report.converged;
        *out = Box::into_raw(Box::new(RvReport { inner: report }));
        if converged {
            Ok(RvStatus::Ok)
        } else {
            set_error("steady state not reached within max_outer iterations".into());
            Ok(RvStatus::NonConvergence)
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_report_iterations(report: *const RvReport, out: *mut usize) -> RvStatus {
    guard(|| {
        *out_arg(out, "out")? = in_arg(report, "report")?.inner.iterations;
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_report_converged(report: *const RvReport, out: *mut bool) -> RvStatus {
    guard(|| {
        *out_arg(out, "out")? = in_arg(report, "report")?.inner.converged;
        Ok(RvStatus::Ok)
    })
}

/// Copies up to `cap` residual values; `written` receives the full history length.
#[no_mangle]
pub unsafe extern "C" fn rv_report_residuals(
    report: *const RvReport,
    values: *mut f64,
    cap: usize,
    written: *mut usize,
) -> RvStatus {
    guard(|| {
        let r = &in_arg(report, "report")?.inner;
        let written = out_arg(written, "written")?;
        *written = r.residual_history.len();
        if cap > 0 {
            if values.is_null() {
                return Err(null("values"));
            }
            let v = std::slice::from_raw_parts_mut(values, cap);
            for (dst, rec) in v.iter_mut().zip(&r.residual_history) {
                *dst = rec.residual;
            }
        }
        Ok(RvStatus::Ok)
    })
}

/// Copies up to `cap` wall samples (angle in degrees, heat flux in W/m^2);
/// `written` receives the number of wall faces.
#[no_mangle]
pub unsafe extern "C" fn rv_report_wall_flux(
    report: *const RvReport,
    theta_deg: *mut f64,
    q_n: *mut f64,
    cap: usize,
    written: *mut usize,
) -> RvStatus {
    guard(|| {
        let r = &in_arg(report, "report")?.inner;
        let written = out_arg(written, "written")?;
        *written = r.wall_flux.len();
        if cap > 0 {
            if theta_deg.is_null() || q_n.is_null() {
                return Err(null("output buffer"));
            }
            let th = std::slice::from_raw_parts_mut(theta_deg, cap);
            let q = std::slice::from_raw_parts_mut(q_n, cap);
            for (k, s) in r.wall_flux.iter().take(cap).enumerate() {
                th[k] = s.theta_deg;
                q[k] = s.q_n;
            }
        }
        Ok(RvStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rv_report_free(report: *mut RvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_arguments_are_reported() {
        unsafe {
            assert_eq!(rv_gas_argon(2, ptr::null_mut()), RvStatus::NullPointer);
            let msg = CStr::from_ptr(rv_last_error()).to_str().unwrap();
            assert!(msg.contains("out"), "{msg}");
            let mut n = 0usize;
            assert_eq!(rv_grid_point_count(ptr::null(), &mut n), RvStatus::NullPointer);
        }
    }

    #[test]
    fn normal_shock_matches_the_library() {
        let (mut r, mut u, mut t) = (0.0, 0.0, 0.0);
        unsafe {
            assert_eq!(rv_normal_shock(5.0 / 3.0, 3.0, &mut r, &mut u, &mut t), RvStatus::Ok);
            assert!((r - 3.0).abs() < 1e-14 && (u - 1.0 / 3.0).abs() < 1e-14);
            assert_eq!(
                rv_normal_shock(5.0 / 3.0, 0.5, &mut r, &mut u, &mut t),
                RvStatus::Numerical
            );
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(rv_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
