//! Axisymmetric grids: a refined `(v_x, zeta)` half plane rotated in `omega`.

use crate::error::{Error, Result};
use crate::velocity::amr::generate_in;
use crate::velocity::support::{axisym_center, build_with_centers};
use crate::velocity::{attach_quadrature, fine_grid_spec_axisym, CoordinateSystem, GridBuild, GridParams, MacroField};

/// `field` carries `(u_x, u_r)`; the radial component enters through `|u_r|`.
pub fn generate_axisym_grid(field: &MacroField, r: f64, params: &GridParams) -> Result<GridBuild> {
    if params.n_omega < 2 {
        return Err(Error::Validation(format!(
            "n_omega must be at least 2, got {}",
            params.n_omega
        )));
    }
    let spec = fine_grid_spec_axisym(field, r, params.c, params.a, params.extend_for_p0)?;
    let support = build_with_centers(field, &spec, r, params.c, params.wall_t, axisym_center);
    let grid = generate_in(
        &spec,
        &support,
        params.a,
        params.max_level,
        CoordinateSystem::Cylindrical {
            n_omega: params.n_omega,
        },
    )?;
    Ok(GridBuild {
        spec,
        support,
        grid: attach_quadrature(grid, params.mode),
    })
}
