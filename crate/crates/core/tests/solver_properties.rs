use proptest::prelude::*;

use rarevel::io::{generate_grid, GridSection};
use rarevel::kinetic::{GasModel, PrimitiveState};
use rarevel::quadrature::Quadrature;
use rarevel::solver::{
    run_to_steady, Boundaries, BoundaryCondition, Initialization, Side, Solver, SolverConfig, SpaceMesh2D,
};
use rarevel::velocity::MacroField;

fn quadrature_for(states: Vec<PrimitiveState>, symmetric: bool) -> Quadrature {
    let gas = GasModel::argon(2);
    let field = MacroField::from_states(states, 2).unwrap();
    let section = GridSection {
        symmetry_axis: symmetric.then_some(1),
        ..Default::default()
    };
    generate_grid(&field, &gas, &section, false)
        .unwrap()
        .grid
        .quadrature()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uniform_equilibrium_is_a_fixed_point(
        rho in 1e-6f64..1e-3,
        ux in -800.0f64..800.0,
        uy in -800.0f64..800.0,
        t in 150.0f64..1500.0,
    ) {
        let gas = GasModel::argon(2);
        let state = PrimitiveState::new(rho, [ux, uy, 0.0], t);
        let quad = quadrature_for(vec![state, PrimitiveState::new(rho, [0.0; 3], 300.0)], false);
        let mesh = SpaceMesh2D::channel(0.05, 0.0, 0.02, 4, 3).unwrap();
        let bcs = Boundaries::uniform(BoundaryCondition::Inflow { state });
        let mut solver = Solver::new(mesh, quad, gas, bcs, SolverConfig::default()).unwrap();
        solver.initialize_uniform(&state).unwrap();
        let r = solver.assemble_rhs().unwrap();
        prop_assert!(r.scaled <= 1e-9, "{}", r.scaled);
    }
}

#[test]
fn cold_wall_is_heated_by_hot_gas() {
    let gas = GasModel::argon(2);
    let hot = PrimitiveState::new(1e-4, [0.0; 3], 900.0);
    let quad = quadrature_for(vec![hot, PrimitiveState::new(1e-4, [0.0; 3], 300.0)], true);
    let mesh = SpaceMesh2D::channel(0.02, 0.0, 0.02, 4, 2).unwrap();
    let bcs = Boundaries {
        i_min: BoundaryCondition::DiffuseWall { t_w: 300.0 },
        i_max: BoundaryCondition::Inflow { state: hot },
        j_min: BoundaryCondition::Inflow { state: hot },
        j_max: BoundaryCondition::Inflow { state: hot },
    };
    let mut solver = Solver::new(mesh, quad, gas, bcs, SolverConfig::default()).unwrap();
    solver.initialize_uniform(&hot).unwrap();
    let flux = solver.wall_heat_flux().unwrap();
    assert_eq!(flux.len(), 2);
    assert!(flux.iter().all(|s| s.side == Side::IMin && s.q_n > 0.0), "{flux:?}");
}

#[test]
fn quiescent_gas_between_walls_converges_to_rest() {
    let gas = GasModel::argon(2);
    let rest = PrimitiveState::new(5e-5, [0.0; 3], 300.0);
    let quad = quadrature_for(vec![rest, PrimitiveState::new(1e-4, [0.0; 3], 300.0)], true);
    let mesh = SpaceMesh2D::channel(0.02, -0.01, 0.01, 4, 2).unwrap();
    let bcs = Boundaries {
        i_min: BoundaryCondition::DiffuseWall { t_w: 300.0 },
        i_max: BoundaryCondition::DiffuseWall { t_w: 300.0 },
        j_min: BoundaryCondition::Inflow { state: rest },
        j_max: BoundaryCondition::Inflow { state: rest },
    };
    let config = SolverConfig {
        max_outer: 20,
        ..Default::default()
    };
    let report = run_to_steady(mesh, quad, gas, bcs, &Initialization::Uniform(rest), config).unwrap();
    assert!(report.converged, "{:?}", report.residual_history.last());
    assert_eq!(report.iterations, 1);
    assert!(report.wall_flux.iter().all(|s| s.q_n.abs() < 1e-6));
}

#[test]
fn heated_channel_drops_four_orders() {
    let gas = GasModel::argon(2);
    let inflow = PrimitiveState::new(1e-6, [0.0, 400.0, 0.0], 300.0);
    let quad = quadrature_for(vec![inflow, PrimitiveState::new(1.5e-6, [0.0; 3], 500.0)], false);
    let mesh = SpaceMesh2D::channel(0.1, 0.0, 0.02, 4, 6).unwrap();
    let bcs = Boundaries {
        i_min: BoundaryCondition::DiffuseWall { t_w: 500.0 },
        i_max: BoundaryCondition::DiffuseWall { t_w: 500.0 },
        j_min: BoundaryCondition::Inflow { state: inflow },
        j_max: BoundaryCondition::Outflow {},
    };
    let config = SolverConfig {
        dt_growth: 1.2,
        max_outer: 300,
        steady_tol: 1e-4,
        second_order_half_factor: true,
        ..Default::default()
    };
    let report = run_to_steady(mesh, quad, gas, bcs, &Initialization::Uniform(inflow), config).unwrap();
    let h = &report.residual_history;
    assert!(
        report.converged && h.last().unwrap().residual < 1e-4 * h[0].residual,
        "{:?} -> {:?}",
        h[0],
        h.last()
    );
    assert!(report.wall_flux.iter().all(|s| s.q_n.is_finite()));
}
