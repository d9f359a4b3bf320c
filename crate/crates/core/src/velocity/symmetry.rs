//! Reflection-symmetric grids.

use crate::error::{Error, Result};
use crate::quadrature::{mirror_partners, MirrorPairing};
use crate::velocity::amr::sort_leaves;
use crate::velocity::{attach_quadrature, AmrVelocityGrid, CoordinateSystem, Leaf, QuadratureMode};

/// Makes `grid` invariant under `v_axis -> -v_axis` and records the point pairing.
///
/// A root box centered on the plane keeps its `v_axis > 0` half and mirrors
/// it; a root box with one face on the plane is mirrored whole.
pub fn symmetrize_grid(grid: &AmrVelocityGrid, axis: usize) -> Result<AmrVelocityGrid> {
    let dim = match grid.coordinate_system {
        CoordinateSystem::Cartesian { dim } => dim,
        CoordinateSystem::Cylindrical { .. } => {
            return Err(Error::Structural(
                "cylindrical grids are symmetric by construction".into(),
            ))
        }
    };
    if axis >= dim {
        return Err(Error::Structural(format!(
            "symmetry axis {axis} outside a {dim}-d grid"
        )));
    }
    let (lo, hi) = grid.root_bounds()[axis];
    let mut out = grid.clone();
    let mirror = |l: &Leaf| {
        let mut m = *l;
        m.lo[axis] = -(l.lo[axis] + l.size);
        m
    };
    let mut leaves: Vec<Leaf>;
    if lo == -hi && grid.lattice.mid[axis] == 0.0 {
        let straddle = grid.leaves.iter().any(|l| l.lo[axis] < 0 && l.lo[axis] + l.size > 0);
        if straddle {
            if grid.leaves.len() != 1 {
                return Err(Error::Structural("leaves straddle the symmetry plane".into()));
            }
            leaves = grid.leaves.clone();
        } else {
            leaves = grid.leaves.iter().filter(|l| l.lo[axis] >= 0).copied().collect();
            let mirrored: Vec<Leaf> = leaves.iter().map(mirror).collect();
            leaves.extend(mirrored);
        }
    } else if lo == 0.0 || hi == 0.0 {
        // Re-anchor the lattice on the plane; the old center becomes an integer offset.
        let ratio = grid.lattice.mid[axis] / grid.lattice.step[axis];
        let shift = ratio.round() as i64;
        if (ratio - shift as f64).abs() > 1e-9 * ratio.abs().max(1.0) {
            return Err(Error::Structural("root box is not aligned with the lattice".into()));
        }
        out.lattice.mid[axis] = 0.0;
        let span = (grid.root_hi[axis] - grid.root_lo[axis]).max(0);
        let (rlo, rhi) = (grid.root_lo[axis] + shift, grid.root_hi[axis] + shift);
        if rlo != 0 && rhi != 0 {
            return Err(Error::Structural("root box does not touch the symmetry plane".into()));
        }
        out.root_lo[axis] = -span;
        out.root_hi[axis] = span;
        leaves = grid
            .leaves
            .iter()
            .map(|l| {
                let mut m = *l;
                m.lo[axis] += shift;
                m
            })
            .collect();
        let mirrored: Vec<Leaf> = leaves.iter().map(mirror).collect();
        leaves.extend(mirrored);
    } else {
        return Err(Error::Structural(format!(
            "root box [{lo}, {hi}] along axis {axis} is neither centered on nor bounded by the plane"
        )));
    }
    sort_leaves(&mut leaves, dim);
    out.leaves = leaves;
    let mut out = attach_quadrature(out, grid.mode.unwrap_or(QuadratureMode::Q1));
    out.symmetry_pairing = Some(MirrorPairing {
        axis,
        partner: mirror_partners(&out.points, &out.weights, dim, axis)?,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::PrimitiveState;
    use crate::velocity::{
        build_support_function, fine_grid_spec, generate_amr, FineGridSpec, MacroField, SupportFunction,
    };

    #[test]
    fn symmetric_uniform_grid_is_fixed_point() {
        let spec = FineGridSpec {
            v_min: vec![-2.0, -2.0],
            v_max: vec![2.0, 2.0],
            dv: 1.0,
            n: vec![5, 5],
            p0_extended: false,
        };
        let phi = SupportFunction {
            phi: vec![1.0; 25],
            wall_entry: None,
        };
        let g = attach_quadrature(generate_amr(&spec, &phi, 1.0).unwrap(), QuadratureMode::Q1);
        let s = symmetrize_grid(&g, 1).unwrap();
        assert_eq!(s.points, g.points);
        assert_eq!(s.weights, g.weights);
        let p = &s.symmetry_pairing.as_ref().unwrap().partner;
        assert!(p.iter().enumerate().all(|(q, &r)| p[r] == q));
    }

    #[test]
    fn asymmetric_field_becomes_symmetric() {
        let f = MacroField::from_states(
            vec![
                PrimitiveState::new(1.0, [0.0, 150.0, 0.0], 100.0),
                PrimitiveState::new(1.0, [0.0, -40.0, 0.0], 900.0),
            ],
            2,
        )
        .unwrap()
        .mirrored(1);
        let spec = fine_grid_spec(&f, 1.0, 2, 3.0, 1.0, false).unwrap();
        assert_eq!(spec.mid(1), 0.0);
        let phi = build_support_function(&f, &spec, 1.0, 3.0, None);
        for mode in [QuadratureMode::Q1, QuadratureMode::P0] {
            let g = attach_quadrature(generate_amr(&spec, &phi, 1.0).unwrap(), mode);
            let s = symmetrize_grid(&g, 1).unwrap();
            let pair = s.symmetry_pairing.as_ref().unwrap();
            for (q, &r) in pair.partner.iter().enumerate() {
                assert_eq!(s.points[r][1], -s.points[q][1]);
                assert_eq!(s.weights[r], s.weights[q]);
            }
            let total: f64 = s.weights.iter().sum();
            assert!((total - s.root_volume()).abs() < 1e-12 * total);
        }
    }

    #[test]
    fn one_sided_grid_is_doubled() {
        let spec = FineGridSpec {
            v_min: vec![-2.0, 0.0],
            v_max: vec![2.0, 4.0],
            dv: 1.0,
            n: vec![5, 5],
            p0_extended: false,
        };
        let mut phi = vec![2.0; 25];
        phi[12] = 0.6;
        let phi = SupportFunction { phi, wall_entry: None };
        let g = attach_quadrature(generate_amr(&spec, &phi, 1.0).unwrap(), QuadratureMode::Q1);
        let s = symmetrize_grid(&g, 1).unwrap();
        assert_eq!(s.root_bounds()[1], (-4.0, 4.0));
        assert_eq!(s.leaves.len(), 2 * g.leaves.len());
        assert!(s.len() <= 2 * g.len());
        assert!((s.root_volume() - 2.0 * g.root_volume()).abs() < 1e-12);
    }

    #[test]
    fn off_plane_root_is_rejected() {
        let spec = FineGridSpec {
            v_min: vec![-2.0, 1.0],
            v_max: vec![2.0, 5.0],
            dv: 1.0,
            n: vec![5, 5],
            p0_extended: false,
        };
        let phi = SupportFunction {
            phi: vec![5.0; 25],
            wall_entry: None,
        };
        let g = attach_quadrature(generate_amr(&spec, &phi, 1.0).unwrap(), QuadratureMode::P0);
        assert!(matches!(symmetrize_grid(&g, 1), Err(Error::Structural(_))));
    }
}
