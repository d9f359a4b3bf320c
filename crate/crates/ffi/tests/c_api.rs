use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use rarevel::kinetic::PrimitiveState;
use rarevel::velocity::MacroField;
use rarevel_ffi::*;

fn cstr(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rv_last_error()).to_string_lossy().into_owned() }
}

fn write_field(dir: &Path) -> std::path::PathBuf {
    let f = MacroField::from_states(
        vec![
            PrimitiveState::new(1e-5, [0.0, 300.0, 0.0], 300.0),
            PrimitiveState::new(4e-5, [300.0, 100.0, 0.0], 2000.0),
        ],
        2,
    )
    .unwrap();
    let p = dir.join("fields.dat");
    f.save(&p).unwrap();
    p
}

#[test]
fn grid_round_trip_and_equilibrium_moments() {
    let dir = tempfile::tempdir().unwrap();
    let field_path = cstr(&write_field(dir.path()));
    unsafe {
        let mut gas = std::mem::zeroed::<RvGas>();
        assert_eq!(rv_gas_argon(2, &mut gas), RvStatus::Ok);

        let mut field = ptr::null_mut();
        assert_eq!(rv_field_load(field_path.as_ptr(), &mut field), RvStatus::Ok);
        let mut cells = 0;
        assert_eq!(rv_field_cell_count(field, &mut cells), RvStatus::Ok);
        assert_eq!(cells, 2);

        let mut grid = ptr::null_mut();
        assert_eq!(
            rv_grid_generate(field, &gas, 4.0, 2.0, RvMode::Q1, -1, &mut grid),
            RvStatus::Ok
        );
        let grid_path = cstr(&dir.path().join("grid.json"));
        assert_eq!(rv_grid_save(grid, grid_path.as_ptr()), RvStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(rv_grid_load(grid_path.as_ptr(), &mut loaded), RvStatus::Ok);

        let (mut n, mut n2) = (0, 0);
        rv_grid_point_count(grid, &mut n);
        rv_grid_point_count(loaded, &mut n2);
        assert!(n > 0 && n == n2);

        let mut pts = vec![0.0; 3 * n];
        let mut w = vec![0.0; n];
        assert_eq!(
            rv_grid_quadrature(loaded, pts.as_mut_ptr(), w.as_mut_ptr(), n),
            RvStatus::Ok
        );
        assert_eq!(
            rv_grid_quadrature(loaded, pts.as_mut_ptr(), w.as_mut_ptr(), n - 1),
            RvStatus::Input
        );

        let state = RvState {
            rho: 2e-5,
            u: [800.0, 50.0, 0.0],
            t: 900.0,
        };
        let (mut m, mut nn) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            rv_equilibrium(loaded, &gas, &state, m.as_mut_ptr(), nn.as_mut_ptr(), n),
            RvStatus::Ok
        );
        let rho: f64 = m.iter().zip(&w).map(|(a, b)| a * b).sum();
        let mom: f64 = (0..n).map(|q| m[q] * pts[3 * q] * w[q]).sum();
        assert!((rho / state.rho - 1.0).abs() < 1e-9, "{rho}");
        assert!((mom / (state.rho * state.u[0]) - 1.0).abs() < 1e-9, "{mom}");

        rv_grid_free(grid);
        rv_grid_free(loaded);
        rv_field_free(field);
    }
}

#[test]
fn failures_set_status_and_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = cstr(&dir.path().join("absent.dat"));
    unsafe {
        let mut field = ptr::null_mut();
        assert_eq!(rv_field_load(missing.as_ptr(), &mut field), RvStatus::Input);
        assert!(field.is_null());
        assert!(last_error().contains("absent.dat"), "{}", last_error());

        let bad = RvGas {
            r: -1.0,
            mu_ref: 1e-5,
            t_ref: 273.0,
            omega_visc: 0.8,
            delta: 0,
            dv: 2,
        };
        let mut grid = ptr::null_mut();
        let field_path = cstr(&write_field(dir.path()));
        assert_eq!(rv_field_load(field_path.as_ptr(), &mut field), RvStatus::Ok);
        assert_eq!(
            rv_grid_generate(field, &bad, 4.0, 2.0, RvMode::P0, -1, &mut grid),
            RvStatus::Input
        );
        rv_field_free(field);
        rv_field_free(ptr::null_mut());
    }
}

#[test]
fn solve_channel_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let field_path = write_field(dir.path());
    let config = r#"{
        "schema": 1,
        "gas": {"r": 208.13, "mu_ref": 2.117e-5, "t_ref": 273.0, "omega_visc": 0.81, "delta": 0, "dv": 2},
        "solver": {"max_outer": 3},
        "case": {
            "mesh": {"generator": "channel", "length": 0.1, "y0": 0.0, "y1": 0.05, "ni": 3, "nj": 4},
            "boundaries": {
                "i_min": {"type": "diffuse_wall", "t_w": 300.0},
                "i_max": {"type": "inflow", "state": {"rho": 1e-5, "u": [0.0, 300.0, 0.0], "t": 300.0}},
                "j_min": {"type": "inflow", "state": {"rho": 1e-5, "u": [0.0, 300.0, 0.0], "t": 300.0}},
                "j_max": {"type": "outflow"}
            }
        }
    }"#;
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, config).unwrap();
    unsafe {
        let mut gas = std::mem::zeroed::<RvGas>();
        rv_gas_argon(2, &mut gas);
        let mut field = ptr::null_mut();
        rv_field_load(cstr(&field_path).as_ptr(), &mut field);
        let mut grid = ptr::null_mut();
        assert_eq!(
            rv_grid_generate(field, &gas, 4.0, 2.0, RvMode::Q1, -1, &mut grid),
            RvStatus::Ok
        );
        let grid_path = cstr(&dir.path().join("grid.json"));
        rv_grid_save(grid, grid_path.as_ptr());

        let mut report = ptr::null_mut();
        let status = rv_solve(cstr(&cfg_path).as_ptr(), grid_path.as_ptr(), &mut report);
        assert_eq!(status, RvStatus::NonConvergence, "{}", last_error());
        assert!(!report.is_null());
        let mut iters = 0;
        rv_report_iterations(report, &mut iters);
        assert_eq!(iters, 3);
        let mut converged = true;
        rv_report_converged(report, &mut converged);
        assert!(!converged);

        let mut len = 0;
        assert_eq!(rv_report_residuals(report, ptr::null_mut(), 0, &mut len), RvStatus::Ok);
        let mut res = vec![0.0; len];
        rv_report_residuals(report, res.as_mut_ptr(), len, &mut len);
        assert_eq!(len, 3);
        assert!(res.iter().all(|r| r.is_finite() && *r >= 0.0));

        let mut faces = 0;
        rv_report_wall_flux(report, ptr::null_mut(), ptr::null_mut(), 0, &mut faces);
        assert_eq!(faces, 4);
        let (mut th, mut q) = (vec![0.0; faces], vec![0.0; faces]);
        rv_report_wall_flux(report, th.as_mut_ptr(), q.as_mut_ptr(), faces, &mut faces);
        assert!(q.iter().all(|v| v.is_finite()));

        rv_report_free(report);
        rv_grid_free(grid);
        rv_field_free(field);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rarevel.h")).unwrap();
    for name in [
        "rv_last_error",
        "rv_version",
        "rv_gas_argon",
        "rv_normal_shock",
        "rv_field_load",
        "rv_grid_generate",
        "rv_grid_quadrature",
        "rv_equilibrium",
        "rv_solve",
        "rv_report_wall_flux",
        "rv_report_free",
        "RV_STATUS_NON_CONVERGENCE",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
