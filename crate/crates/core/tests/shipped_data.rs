use std::path::PathBuf;

use rarevel::io::RunConfig;
use rarevel::kinetic::GasModel;
use rarevel::solver::SpaceMesh2D;
use rarevel::surrogate::CylinderSurrogate;
use rarevel::velocity::MacroField;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn header_extrema(text: &str) -> Vec<(String, f64, f64)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# extrema "))
        .map(|l| {
            let w: Vec<&str> = l.split_whitespace().collect();
            (w[0].to_string(), w[1].parse().unwrap(), w[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn cylinder_field_matches_its_header() {
    let path = data("cyl_cns.dat");
    let field = MacroField::load(&path).unwrap();
    assert_eq!(field.dims, vec![50, 50]);
    let ex = field.extrema();
    let header = header_extrema(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header.len(), 4);
    for (name, lo, hi) in header {
        let got = match name.as_str() {
            "rho" => ex.rho,
            "u_x" => ex.u[0],
            "u_y" => ex.u[1],
            "T" => ex.t,
            other => panic!("unexpected column {other}"),
        };
        assert_eq!(got, (lo, hi), "{name}");
    }
}

#[test]
fn cylinder_field_is_the_analytic_surrogate() {
    let gas = GasModel::argon(2);
    let mesh = SpaceMesh2D::annulus_sector(0.1, 0.5, 50, 50, Some(1.5e-5), 90.0).unwrap();
    let regenerated = CylinderSurrogate::default().field_on(&mesh, &gas).unwrap();
    let shipped = MacroField::load(data("cyl_cns.dat")).unwrap();
    for (a, b) in regenerated.cells.iter().zip(&shipped.cells) {
        assert!((a.rho / b.rho - 1.0).abs() < 1e-14);
        assert!((a.t / b.t - 1.0).abs() < 1e-14);
        for k in 0..2 {
            assert!((a.u[k] - b.u[k]).abs() <= 1e-12 * (1.0 + b.u[k].abs()));
        }
    }
}

#[test]
fn cylinder_configuration_loads_and_validates() {
    let cfg = RunConfig::load(data("cylinder.json")).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.grid.symmetry_axis, Some(1));
    assert!(cfg.solver.second_order_half_factor);
}
