use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rarevel::kinetic::PrimitiveState;
use rarevel::velocity::MacroField;

fn rarevel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rarevel"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

const CHANNEL: &str = r#"{
    "schema": 1,
    "gas": {"r": 208.13, "mu_ref": 2.117e-5, "t_ref": 273.0, "omega_visc": 0.81, "delta": 0, "dv": 2},
    "grid": {"file": "grid.json"},
    "solver": {"max_outer": 2},
    "case": {
        "mesh": {"generator": "channel", "length": 0.1, "y0": 0.0, "y1": 0.05, "ni": 3, "nj": 3},
        "boundaries": {
            "i_min": {"type": "diffuse_wall", "t_w": 300.0},
            "i_max": {"type": "diffuse_wall", "t_w": 300.0},
            "j_min": {"type": "inflow", "state": {"rho": 1e-5, "u": [0.0, 300.0, 0.0], "t": 300.0}},
            "j_max": {"type": "outflow"}
        }
    },
    "output": {"dir": "out"}
}"#;

#[test]
fn solve_without_grid_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), CHANNEL).unwrap();
    let out = rarevel(&["solve", "--config", "run.json"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.json"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn gridgen_then_short_solve() {
    let dir = tempfile::tempdir().unwrap();
    let field = MacroField::from_states(
        vec![
            PrimitiveState::new(1e-5, [0.0, 300.0, 0.0], 300.0),
            PrimitiveState::new(2e-5, [0.0, 0.0, 0.0], 300.0),
        ],
        2,
    )
    .unwrap();
    field.save(dir.path().join("f.dat")).unwrap();
    std::fs::write(dir.path().join("run.json"), CHANNEL).unwrap();

    let out = rarevel(&["gridgen", "--fields", "f.dat", "--config", "run.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("reduction factor"));
    assert!(dir.path().join("grid.json").is_file());

    // Two iterations cannot reach the tolerance: outputs are written, exit 3.
    let out = rarevel(&["solve", "--config", "run.json"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let flux = dir.path().join("out/wall_flux.csv");
    assert!(flux.is_file());

    let out = rarevel(
        &[
            "flux-compare",
            flux.to_str().unwrap(),
            flux.to_str().unwrap(),
            "--tol",
            "0",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("max relative diff  0.0000%"), "{text}");

    let out = rarevel(&["info", "grid.json"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).contains("velocity grid"));
}

#[test]
fn gridgen_on_shipped_cylinder_field() {
    let dir = tempfile::tempdir().unwrap();
    let fields = data("cyl_cns.dat");
    let out = rarevel(
        &["gridgen", "--fields", fields.to_str().unwrap(), "-o", "g.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let factor: f64 = text
        .lines()
        .find(|l| l.starts_with("reduction factor"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!((4.0..=10.0).contains(&factor), "{factor}");
}

#[test]
fn unknown_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rarevel(&["info", "nothing.dat"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
