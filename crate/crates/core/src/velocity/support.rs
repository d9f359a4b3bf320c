//! Support function on the fine grid.

use serde::{Deserialize, Serialize};

use crate::velocity::{FineGridSpec, MacroField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportFunction {
    /// `sqrt(RT)` per fine node, flattened like [`FineGridSpec::node`].
    pub phi: Vec<f64>,
    /// Extra sample `(v = 0, sqrt(R T_wall))`.
    pub wall_entry: Option<f64>,
}

impl SupportFunction {
    pub fn min(&self) -> f64 {
        self.phi
            .iter()
            .chain(self.wall_entry.iter())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.phi
            .iter()
            .chain(self.wall_entry.iter())
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Closed-ball test `|v - u| <= radius`, shared by every caller so that the
/// boundary convention is identical everywhere.
#[inline]
pub fn in_sphere(v: &[f64; 3], u: &[f64; 3], radius: f64, dim: usize) -> bool {
    let mut d2 = 0.0;
    for k in 0..dim {
        let d = v[k] - u[k];
        d2 += d * d;
    }
    d2 <= radius * radius
}

/// Velocity used for cell `n` of the field in the grid's coordinates; the
/// axisymmetric grid works with `|u_r|`.
pub(crate) type CenterMap = fn(&[f64; 3]) -> [f64; 3];

pub(crate) fn identity_center(u: &[f64; 3]) -> [f64; 3] {
    *u
}

pub(crate) fn axisym_center(u: &[f64; 3]) -> [f64; 3] {
    [u[0], u[1].abs(), 0.0]
}

/// Cells are visited by decreasing `sqrt(RT)`; each one overwrites the nodes
/// inside its ball of radius `c sqrt(RT)`, so a node ends up with the
/// smallest covering value, or the global maximum when nothing covers it.
pub fn build_support_function(
    field: &MacroField,
    spec: &FineGridSpec,
    r: f64,
    c: f64,
    wall_t: Option<f64>,
) -> SupportFunction {
    build_with_centers(field, spec, r, c, wall_t, identity_center)
}

pub(crate) fn build_with_centers(
    field: &MacroField,
    spec: &FineGridSpec,
    r: f64,
    c: f64,
    wall_t: Option<f64>,
    center: CenterMap,
) -> SupportFunction {
    let dim = spec.dim();
    let psi = field.thermal_speeds(r);
    let mut order: Vec<usize> = (0..psi.len()).collect();
    order.sort_by(|&a, &b| psi[b].total_cmp(&psi[a]).then(a.cmp(&b)));
    let psi_max = psi[order[0]];
    let mut phi = vec![psi_max; spec.len()];

    let half = 0.5 * spec.dv;
    for &cell in &order {
        let u = center(&field.cells[cell].u);
        let radius = c * psi[cell];
        // Candidate index box, one node of slack per side; the ball test decides.
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut empty = false;
        for k in 0..dim {
            let s = spec.steps(k) as f64;
            let to_idx = |x: f64| ((x - spec.mid(k)) / half + s) / 2.0;
            let a = (to_idx(u[k] - radius).floor() - 1.0).max(0.0);
            let b = (to_idx(u[k] + radius).ceil() + 1.0).min(s);
            if a > b {
                empty = true;
                break;
            }
            lo[k] = a as usize;
            hi[k] = b as usize;
        }
        if empty {
            continue;
        }
        let mut idx = lo;
        'nodes: loop {
            let q = spec.flat_index(&idx);
            if in_sphere(&spec.node(q), &u, radius, dim) {
                phi[q] = psi[cell];
            }
            for k in 0..dim {
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    continue 'nodes;
                }
                idx[k] = lo[k];
            }
            break;
        }
    }
    SupportFunction {
        phi,
        wall_entry: wall_t.map(|t| (r * t).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::PrimitiveState;
    use crate::velocity::fine_grid_spec;

    fn brute_force(field: &MacroField, spec: &FineGridSpec, r: f64, c: f64) -> Vec<f64> {
        let psi = field.thermal_speeds(r);
        let max = psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..spec.len())
            .map(|q| {
                let v = spec.node(q);
                field
                    .cells
                    .iter()
                    .zip(&psi)
                    .filter(|(cell, s)| in_sphere(&v, &cell.u, c * **s, spec.dim()))
                    .map(|(_, s)| *s)
                    .fold(max, f64::min)
            })
            .collect()
    }

    #[test]
    fn uniform_field_is_constant() {
        let f = MacroField::from_states(vec![PrimitiveState::new(1.0, [0.0; 3], 100.0); 4], 2).unwrap();
        let s = fine_grid_spec(&f, 1.0, 2, 4.0, 1.0, false).unwrap();
        let sf = build_support_function(&f, &s, 1.0, 4.0, None);
        assert!(sf.phi.iter().all(|&p| p == 10.0));
    }

    #[test]
    fn nested_spheres() {
        // sqrt(RT) = 100 and 300, both centered at 0, c = 3.
        let f = MacroField::from_states(
            vec![
                PrimitiveState::new(1.0, [0.0; 3], 1e4),
                PrimitiveState::new(1.0, [0.0; 3], 9e4),
            ],
            2,
        )
        .unwrap();
        let s = fine_grid_spec(&f, 1.0, 2, 3.0, 1.0, false).unwrap();
        let sf = build_support_function(&f, &s, 1.0, 3.0, None);
        for q in 0..s.len() {
            let v = s.node(q);
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let expect = if n <= 300.0 { 100.0 } else { 300.0 };
            assert_eq!(sf.phi[q], expect, "node {v:?}");
        }
        assert_eq!(sf.phi, brute_force(&f, &s, 1.0, 3.0));
    }

    #[test]
    fn wall_entry_is_appended() {
        let f = MacroField::from_states(vec![PrimitiveState::new(1.0, [0.0; 3], 100.0)], 2).unwrap();
        let s = fine_grid_spec(&f, 1.0, 2, 4.0, 1.0, false).unwrap();
        let sf = build_support_function(&f, &s, 1.0, 4.0, Some(25.0));
        assert_eq!(sf.wall_entry, Some(5.0));
        assert_eq!(sf.min(), 5.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field_strategy() -> impl Strategy<Value = MacroField> {
            prop::collection::vec((-500.0..500.0f64, -500.0..500.0f64, 10.0..1e4f64), 1..30).prop_map(|cells| {
                let states = cells
                    .into_iter()
                    .map(|(ux, uy, t)| PrimitiveState::new(1.0, [ux, uy, 0.0], t))
                    .collect();
                MacroField::from_states(states, 2).unwrap()
            })
        }

        proptest! {
            #[test]
            fn matches_closed_form(field in field_strategy(), c in 1.0..4.0f64, a in 0.5..3.0f64) {
                let spec = fine_grid_spec(&field, 1.0, 2, c, a, false).unwrap();
                prop_assume!(spec.len() <= 2000);
                let sf = build_support_function(&field, &spec, 1.0, c, None);
                let psi = field.thermal_speeds(1.0);
                let (lo, hi) = psi.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &p| (l.min(p), h.max(p)));
                prop_assert!(sf.phi.iter().all(|&p| p >= lo && p <= hi));
                prop_assert_eq!(sf.phi, brute_force(&field, &spec, 1.0, c));
            }
        }
    }
}
