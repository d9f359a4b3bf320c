//! Boundary conditions through two layers of ghost cells.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_discrete_equilibrium, NewtonOptions};
use crate::error::{Error, Result};
use crate::kinetic::{ConservedState, GasModel, PrimitiveState};
use crate::quadrature::Quadrature;
use crate::solver::{DistributionField, SpaceMesh2D};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryCondition {
    /// Full accommodation at wall temperature `t_w` (K).
    DiffuseWall {
        t_w: f64,
    },
    Inflow {
        state: PrimitiveState,
    },
    Outflow {},
    /// Reflection `v_axis -> -v_axis`; the grid must carry the matching pairing.
    SymmetryPlane {
        axis: usize,
    },
}

impl BoundaryCondition {
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryCondition::DiffuseWall { t_w } if !(t_w.is_finite() && *t_w > 0.0) => Err(Error::Validation(
                format!("wall temperature must be positive, got {t_w}"),
            )),
            BoundaryCondition::Inflow { state } => {
                state.validate().map_err(|e| Error::Validation(format!("inflow: {e}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    IMin,
    IMax,
    JMin,
    JMax,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::IMin, Side::IMax, Side::JMin, Side::JMax];

    fn index(self) -> usize {
        self as usize
    }
}

/// One condition per mesh side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundaries {
    pub i_min: BoundaryCondition,
    pub i_max: BoundaryCondition,
    pub j_min: BoundaryCondition,
    pub j_max: BoundaryCondition,
}

impl Boundaries {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Boundaries {
            i_min: bc,
            i_max: bc,
            j_min: bc,
            j_max: bc,
        }
    }

    pub fn get(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::IMin => &self.i_min,
            Side::IMax => &self.i_max,
            Side::JMin => &self.j_min,
            Side::JMax => &self.j_max,
        }
    }

    pub fn has_wall(&self) -> bool {
        Side::ALL
            .iter()
            .any(|&s| matches!(self.get(s), BoundaryCondition::DiffuseWall { .. }))
    }
}

/// A boundary face with its two interior and two ghost cells.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFace {
    pub cell1: (isize, isize),
    pub cell2: (isize, isize),
    pub ghost1: (isize, isize),
    pub ghost2: (isize, isize),
    /// Length-scaled normal pointing out of the fluid.
    pub normal_out: [f64; 2],
    pub midpoint: [f64; 2],
}

impl BoundaryFace {
    pub fn length(&self) -> f64 {
        self.normal_out[0].hypot(self.normal_out[1])
    }
}

pub fn side_faces(mesh: &SpaceMesh2D, side: Side) -> Vec<BoundaryFace> {
    let (ni, nj) = (mesh.ni as isize, mesh.nj as isize);
    let neg = |n: [f64; 2]| [-n[0], -n[1]];
    let mid = |a: [f64; 2], b: [f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    match side {
        Side::IMin | Side::IMax => (0..mesh.nj)
            .map(|j| {
                let jj = j as isize;
                let (i, c1, c2, g1, g2, n) = if side == Side::IMin {
                    (0, 0, 1, -1, -2, neg(mesh.ni_face(0, j)))
                } else {
                    (mesh.ni, ni - 1, ni - 2, ni, ni + 1, mesh.ni_face(mesh.ni, j))
                };
                BoundaryFace {
                    cell1: (c1, jj),
                    cell2: (c2, jj),
                    ghost1: (g1, jj),
                    ghost2: (g2, jj),
                    normal_out: n,
                    midpoint: mid(mesh.node(i, j), mesh.node(i, j + 1)),
                }
            })
            .collect(),
        Side::JMin | Side::JMax => (0..mesh.ni)
            .map(|i| {
                let ii = i as isize;
                let (j, c1, c2, g1, g2, n) = if side == Side::JMin {
                    (0, 0, 1, -1, -2, neg(mesh.nj_face(i, 0)))
                } else {
                    (mesh.nj, nj - 1, nj - 2, nj, nj + 1, mesh.nj_face(i, mesh.nj))
                };
                BoundaryFace {
                    cell1: (ii, c1),
                    cell2: (ii, c2),
                    ghost1: (ii, g1),
                    ghost2: (ii, g2),
                    normal_out: n,
                    midpoint: mid(mesh.node(i, j), mesh.node(i + 1, j)),
                }
            })
            .collect(),
    }
}

/// Per-side data computed once per run.
#[derive(Clone, Debug)]
pub(crate) enum PreparedBc {
    Wall { m: Vec<f64>, n: Vec<f64> },
    Inflow { m: Vec<f64>, n: Vec<f64> },
    Outflow,
    Symmetry { partner: Vec<usize> },
}

pub(crate) fn prepare(
    bcs: &Boundaries,
    quad: &Quadrature,
    gas: &GasModel,
    opts: &NewtonOptions,
) -> Result<Vec<PreparedBc>> {
    Side::ALL
        .iter()
        .map(|&side| {
            let bc = bcs.get(side);
            bc.validate()?;
            Ok(match *bc {
                BoundaryCondition::DiffuseWall { t_w } => {
                    let u = ConservedState::from_primitive(&PrimitiveState::new(1.0, [0.0; 3], t_w), gas);
                    let eq = solve_discrete_equilibrium(&u, quad, gas, opts)?;
                    PreparedBc::Wall { m: eq.m, n: eq.n }
                }
                BoundaryCondition::Inflow { state } => {
                    let eq = solve_discrete_equilibrium(&ConservedState::from_primitive(&state, gas), quad, gas, opts)?;
                    PreparedBc::Inflow { m: eq.m, n: eq.n }
                }
                BoundaryCondition::Outflow {} => PreparedBc::Outflow,
                BoundaryCondition::SymmetryPlane { axis } => match quad.mirror() {
                    Some(p) if p.axis == axis => PreparedBc::Symmetry {
                        partner: p.partner.clone(),
                    },
                    _ => {
                        return Err(Error::Validation(format!(
                            "symmetry plane on side {side:?} needs a velocity grid paired along axis {axis}"
                        )))
                    }
                },
            })
        })
        .collect()
}

/// Re-emission factor per wall face, indexed like [`side_faces`].
pub type WallSigma = [Vec<f64>; 4];

pub(crate) fn fill_ghosts(
    field: &mut DistributionField,
    mesh: &SpaceMesh2D,
    quad: &Quadrature,
    prepared: &[PreparedBc],
) -> Result<WallSigma> {
    let nq = quad.len();
    let mut sigma: WallSigma = Default::default();
    for side in Side::ALL {
        let faces = side_faces(mesh, side);
        match &prepared[side.index()] {
            PreparedBc::Outflow => {
                for bf in &faces {
                    field.copy_cell(bf.cell1, bf.ghost1);
                    field.copy_cell(bf.cell1, bf.ghost2);
                }
            }
            PreparedBc::Inflow { m, n } => {
                for bf in &faces {
                    for g in [bf.ghost1, bf.ghost2] {
                        field.f_at_mut(g.0, g.1).copy_from_slice(m);
                        field.g_at_mut(g.0, g.1).copy_from_slice(n);
                    }
                }
            }
            PreparedBc::Symmetry { partner } => {
                for bf in &faces {
                    for (src, dst) in [(bf.cell1, bf.ghost1), (bf.cell2, bf.ghost2)] {
                        let (so, dof) = (field.offset(src.0, src.1), field.offset(dst.0, dst.1));
                        for q in 0..nq {
                            field.f[dof + q] = field.f[so + partner[q]];
                            field.g[dof + q] = field.g[so + partner[q]];
                        }
                    }
                }
            }
            PreparedBc::Wall { m, n } => {
                let mut s = Vec::with_capacity(faces.len());
                for bf in &faces {
                    let nrm = bf.normal_out;
                    let o1 = field.offset(bf.cell1.0, bf.cell1.1);
                    let mut num = 0.0;
                    let mut den = 0.0;
                    for q in 0..nq {
                        let v = &quad.points[q];
                        let a = v[0] * nrm[0] + v[1] * nrm[1];
                        if a > 0.0 {
                            num += a * field.f[o1 + q] * quad.weights[q];
                        } else if a < 0.0 {
                            den -= a * m[q] * quad.weights[q];
                        }
                    }
                    if den <= 0.0 {
                        return Err(Error::GridInadequacy(format!(
                            "no velocity point leaves the wall on side {side:?}"
                        )));
                    }
                    let sg = num / den;
                    let og = field.offset(bf.ghost1.0, bf.ghost1.1);
                    for q in 0..nq {
                        let v = &quad.points[q];
                        let a = v[0] * nrm[0] + v[1] * nrm[1];
                        if a < 0.0 {
                            field.f[og + q] = sg * m[q];
                            field.g[og + q] = sg * n[q];
                        } else {
                            field.f[og + q] = field.f[o1 + q];
                            field.g[og + q] = field.g[o1 + q];
                        }
                    }
                    field.copy_cell(bf.ghost1, bf.ghost2);
                    s.push(sg);
                }
                sigma[side.index()] = s;
            }
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_shape() {
        let b = Boundaries {
            i_min: BoundaryCondition::DiffuseWall { t_w: 293.0 },
            i_max: BoundaryCondition::Inflow {
                state: PrimitiveState::new(1e-5, [100.0, 0.0, 0.0], 200.0),
            },
            j_min: BoundaryCondition::SymmetryPlane { axis: 1 },
            j_max: BoundaryCondition::Outflow {},
        };
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains(r#""type":"diffuse_wall","t_w":293.0"#), "{s}");
        let back: Boundaries = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
        assert!(serde_json::from_str::<BoundaryCondition>(r#"{"type":"outflow","x":1}"#).is_err());
    }

    #[test]
    fn faces_have_outward_normals() {
        let m = SpaceMesh2D::channel(2.0, 0.0, 1.0, 4, 5).unwrap();
        let expect = [[0.0, -1.0], [0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]];
        for (side, e) in Side::ALL.iter().zip(expect) {
            for bf in side_faces(&m, *side) {
                let l = bf.length();
                assert!((bf.normal_out[0] / l - e[0]).abs() < 1e-14 && (bf.normal_out[1] / l - e[1]).abs() < 1e-14);
            }
        }
    }
}
