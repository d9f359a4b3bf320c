//! Linearized implicit step: Jacobi over velocity points, line Gauss-Seidel
//! in space with exact tridiagonal solves along `i`.
//!
//! The operator is `I/dt + T + R` where `T` is first-order upwind transport
//! with zero increments in ghost cells and `R dF = (1/tau)(dF - dM(dU))`.
//! `R` is split into its diagonal `(1/tau)(1 - D)` and the remainder, which
//! is lagged over the inner passes.

use rayon::prelude::*;

use crate::equilibrium::EquilibriumJacobian;
use crate::error::{Error, Result};
use crate::kinetic::{MomentVector, MAX_MOMENTS};
use crate::linalg::thomas;
use crate::quadrature::Quadrature;
use crate::solver::SpaceMesh2D;

/// Frozen coefficients of one implicit step. Per-point arrays are stored
/// velocity-major (`q * n_cells + cell`).
pub(crate) struct LinearOperator<'a> {
    pub mesh: &'a SpaceMesh2D,
    pub quad: &'a Quadrature,
    pub jac: &'a [EquilibriumJacobian],
    pub inv_tau: &'a [f64],
    pub inv_dt: f64,
    m: Vec<f64>,
    n: Vec<f64>,
    diag_f: Vec<f64>,
    diag_g: Vec<f64>,
}

#[inline]
fn neg(a: f64) -> f64 {
    a.min(0.0)
}

impl<'a> LinearOperator<'a> {
    /// `eq_m`, `eq_n` are cell-major equilibrium values.
    pub fn new(
        mesh: &'a SpaceMesh2D,
        quad: &'a Quadrature,
        jac: &'a [EquilibriumJacobian],
        inv_tau: &'a [f64],
        dt: f64,
        eq_m: &[f64],
        eq_n: &[f64],
    ) -> Self {
        let nc = mesh.n_cells();
        let nq = quad.len();
        let mut m = vec![0.0; nc * nq];
        let mut n = vec![0.0; nc * nq];
        let mut diag_f = vec![0.0; nc * nq];
        let mut diag_g = vec![0.0; nc * nq];
        m.par_chunks_mut(nc)
            .zip(n.par_chunks_mut(nc))
            .zip(diag_f.par_chunks_mut(nc))
            .zip(diag_g.par_chunks_mut(nc))
            .enumerate()
            .for_each(|(q, (((mq, nq_), df), dg))| {
                let v = &quad.points[q];
                let w = quad.weights[q];
                for c in 0..nc {
                    let (a, b) = (eq_m[c * nq + q], eq_n[c * nq + q]);
                    mq[c] = a;
                    nq_[c] = b;
                    let mh = jac[c].m_hat(v);
                    df[c] = jac[c].diag_f(a, &mh, w);
                    dg[c] = jac[c].diag_g(b, &mh, w);
                }
            });
        LinearOperator {
            mesh,
            quad,
            jac,
            inv_tau,
            inv_dt: 1.0 / dt,
            m,
            n,
            diag_f,
            diag_g,
        }
    }

    fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    /// Moment increments of velocity-major `(df, dg)`, converted to
    /// Jacobian directions per cell. Summation runs in ascending `q`.
    fn directions(&self, df: &[f64], dg: &[f64]) -> Vec<MomentVector> {
        let nc = self.n_cells();
        let dim = self.quad.dim();
        let mut du = vec![[0.0; MAX_MOMENTS]; nc];
        for q in 0..self.quad.len() {
            let v = &self.quad.points[q];
            let w = self.quad.weights[q];
            let h = self.quad.half_v2[q];
            let (fq, gq) = (&df[q * nc..(q + 1) * nc], &dg[q * nc..(q + 1) * nc]);
            for c in 0..nc {
                let fw = fq[c] * w;
                let acc = &mut du[c];
                acc[0] += fw;
                for k in 0..dim {
                    acc[k + 1] += v[k] * fw;
                }
                acc[dim + 1] += h * fw + gq[c] * w;
            }
        }
        du.par_iter()
            .zip(self.jac.par_iter())
            .map(|(u, j)| j.direction(u))
            .collect()
    }

    /// Applies `I/dt + T + R` to cell-major increments.
    pub fn apply(&self, df: &[f64], dg: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nc = self.n_cells();
        let nq = self.quad.len();
        let (dft, dgt) = (to_point_major(df, nc, nq), to_point_major(dg, nc, nq));
        let w = self.directions(&dft, &dgt);
        let (ni, nj) = (self.mesh.ni, self.mesh.nj);
        let mut of = vec![0.0; nc * nq];
        let mut og = vec![0.0; nc * nq];
        for j in 0..nj {
            for i in 0..ni {
                let c = self.mesh.cell(i, j);
                let nrm = self.mesh.outward_normals(i, j);
                let inv = 1.0 / self.mesh.volume[c];
                let nb = [
                    (i > 0).then(|| c - 1),
                    (i + 1 < ni).then(|| c + 1),
                    (j > 0).then(|| c - ni),
                    (j + 1 < nj).then(|| c + ni),
                ];
                for q in 0..nq {
                    let v = &self.quad.points[q];
                    let mut tf = 0.0;
                    let mut tg = 0.0;
                    for k in 0..4 {
                        let a = v[0] * nrm[k][0] + v[1] * nrm[k][1];
                        tf += a.max(0.0) * df[c * nq + q];
                        tg += a.max(0.0) * dg[c * nq + q];
                        if let Some(n) = nb[k] {
                            tf += neg(a) * df[n * nq + q];
                            tg += neg(a) * dg[n * nq + q];
                        }
                    }
                    let mh = self.jac[c].m_hat(v);
                    let dm = self.jac[c].dm(self.m[q * nc + c], &mh, &w[c]);
                    let dn = self.jac[c].dn(self.n[q * nc + c], &mh, &w[c]);
                    let it = self.inv_tau[c];
                    of[c * nq + q] = self.inv_dt * df[c * nq + q] + inv * tf + it * (df[c * nq + q] - dm);
                    og[c * nq + q] = self.inv_dt * dg[c * nq + q] + inv * tg + it * (dg[c * nq + q] - dn);
                }
            }
        }
        (of, og)
    }

    /// Approximate solution of `(I/dt + T + R) dF = rhs` after `passes`
    /// Jacobi passes, each with a forward and a backward sweep in `j`.
    /// Input and output are cell-major.
    pub fn solve(&self, rhs_f: &[f64], rhs_g: &[f64], passes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let nc = self.n_cells();
        let nq = self.quad.len();
        let rf = to_point_major(rhs_f, nc, nq);
        let rg = to_point_major(rhs_g, nc, nq);
        let mut df = vec![0.0; nc * nq];
        let mut dg = vec![0.0; nc * nq];
        for p in 0..passes {
            let w = if p == 0 {
                vec![[0.0; MAX_MOMENTS]; nc]
            } else {
                self.directions(&df, &dg)
            };
            let lagged = p > 0;
            df.par_chunks_mut(nc)
                .zip(dg.par_chunks_mut(nc))
                .enumerate()
                .try_for_each(|(q, (fq, gq))| {
                    self.sweep_point(
                        q,
                        &rf[q * nc..(q + 1) * nc],
                        &rg[q * nc..(q + 1) * nc],
                        &w,
                        lagged,
                        fq,
                        gq,
                    )
                })?;
        }
        Ok((to_cell_major(&df, nc, nq), to_cell_major(&dg, nc, nq)))
    }

    #[allow(clippy::too_many_arguments)]
    fn sweep_point(
        &self,
        q: usize,
        rf: &[f64],
        rg: &[f64],
        w: &[MomentVector],
        lagged: bool,
        df: &mut [f64],
        dg: &mut [f64],
    ) -> Result<()> {
        let nc = self.n_cells();
        let (ni, nj) = (self.mesh.ni, self.mesh.nj);
        let v = &self.quad.points[q];
        let o = q * nc;
        // Right-hand side plus the lagged off-diagonal collision part.
        let mut bf = rf.to_vec();
        let mut bg = rg.to_vec();
        if lagged {
            for c in 0..nc {
                let mh = self.jac[c].m_hat(v);
                let it = self.inv_tau[c];
                bf[c] += it * (self.jac[c].dm(self.m[o + c], &mh, &w[c]) - self.diag_f[o + c] * df[c]);
                bg[c] += it * (self.jac[c].dn(self.n[o + c], &mh, &w[c]) - self.diag_g[o + c] * dg[c]);
            }
        }
        let mut lower = vec![0.0; ni];
        let mut upper = vec![0.0; ni];
        let mut d_f = vec![0.0; ni];
        let mut d_g = vec![0.0; ni];
        let mut xf = vec![0.0; ni];
        let mut xg = vec![0.0; ni];
        let mut scratch = vec![0.0; ni];
        for j in (0..nj).chain((0..nj).rev()) {
            for i in 0..ni {
                let c = self.mesh.cell(i, j);
                let nrm = self.mesh.outward_normals(i, j);
                let a: [f64; 4] = std::array::from_fn(|k| v[0] * nrm[k][0] + v[1] * nrm[k][1]);
                let inv = 1.0 / self.mesh.volume[c];
                let out: f64 = a.iter().map(|x| x.max(0.0)).sum::<f64>() * inv;
                let it = self.inv_tau[c];
                lower[i] = if i > 0 { inv * neg(a[0]) } else { 0.0 };
                upper[i] = if i + 1 < ni { inv * neg(a[1]) } else { 0.0 };
                d_f[i] = self.inv_dt + out + it * (1.0 - self.diag_f[o + c]);
                d_g[i] = self.inv_dt + out + it * (1.0 - self.diag_g[o + c]);
                let mut sf = bf[c];
                let mut sg = bg[c];
                if j > 0 {
                    sf -= inv * neg(a[2]) * df[c - ni];
                    sg -= inv * neg(a[2]) * dg[c - ni];
                }
                if j + 1 < nj {
                    sf -= inv * neg(a[3]) * df[c + ni];
                    sg -= inv * neg(a[3]) * dg[c + ni];
                }
                xf[i] = sf;
                xg[i] = sg;
            }
            let fail =
                |i: usize| Error::LinearSolver(format!("vanishing pivot at cell ({i}, {j}), velocity point {q}"));
            thomas(&lower, &d_f, &upper, &mut xf, &mut scratch).map_err(fail)?;
            thomas(&lower, &d_g, &upper, &mut xg, &mut scratch).map_err(fail)?;
            let row = j * ni;
            df[row..row + ni].copy_from_slice(&xf);
            dg[row..row + ni].copy_from_slice(&xg);
        }
        Ok(())
    }
}

fn to_point_major(x: &[f64], nc: usize, nq: usize) -> Vec<f64> {
    let mut out = vec![0.0; nc * nq];
    for c in 0..nc {
        for q in 0..nq {
            out[q * nc + c] = x[c * nq + q];
        }
    }
    out
}

fn to_cell_major(x: &[f64], nc: usize, nq: usize) -> Vec<f64> {
    let mut out = vec![0.0; nc * nq];
    for q in 0..nq {
        for c in 0..nc {
            out[c * nq + q] = x[q * nc + c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_discrete_equilibrium, NewtonOptions};
    use crate::kinetic::{relaxation_time, ConservedState, GasModel, PrimitiveState};

    struct Setup {
        mesh: SpaceMesh2D,
        quad: Quadrature,
        jac: Vec<EquilibriumJacobian>,
        inv_tau: Vec<f64>,
        m: Vec<f64>,
        n: Vec<f64>,
    }

    fn setup(ni: usize, nj: usize) -> Setup {
        let gas = GasModel {
            r: 1.0,
            mu_ref: 0.5,
            t_ref: 1.0,
            omega_visc: 0.5,
            ..GasModel::argon(2)
        };
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for a in -3..=3 {
            for b in -3..=3 {
                pts.push([a as f64, b as f64, 0.0]);
                w.push(1.0);
            }
        }
        let quad = Quadrature::new(2, pts, w).unwrap();
        let mesh = SpaceMesh2D::annulus_sector(1.0, 2.0, ni, nj, None, 90.0).unwrap();
        let mut jac = Vec::new();
        let mut inv_tau = Vec::new();
        let mut m = Vec::new();
        let mut n = Vec::new();
        for c in 0..mesh.n_cells() {
            let p = PrimitiveState::new(
                1.0 + 0.1 * c as f64,
                [0.2, -0.1 * c as f64 / 4.0, 0.0],
                1.0 + 0.05 * c as f64,
            );
            let eq = solve_discrete_equilibrium(
                &ConservedState::from_primitive(&p, &gas),
                &quad,
                &gas,
                &NewtonOptions::default(),
            )
            .unwrap();
            jac.push(EquilibriumJacobian::new(eq.summary(), 2));
            inv_tau.push(1.0 / relaxation_time(&p, &gas));
            m.extend_from_slice(&eq.m);
            n.extend_from_slice(&eq.n);
        }
        Setup {
            mesh,
            quad,
            jac,
            inv_tau,
            m,
            n,
        }
    }

    #[test]
    fn zero_rhs_gives_zero_increment() {
        let s = setup(3, 3);
        let op = LinearOperator::new(&s.mesh, &s.quad, &s.jac, &s.inv_tau, 0.1, &s.m, &s.n);
        let z = vec![0.0; s.mesh.n_cells() * s.quad.len()];
        let (df, dg) = op.solve(&z, &z, 3).unwrap();
        assert!(df.iter().chain(&dg).all(|&x| x == 0.0));
    }

    #[test]
    fn many_passes_invert_the_operator() {
        let s = setup(4, 3);
        let tau = 1.0 / s.inv_tau[0];
        let op = LinearOperator::new(&s.mesh, &s.quad, &s.jac, &s.inv_tau, 0.5 * tau, &s.m, &s.n);
        let len = s.mesh.n_cells() * s.quad.len();
        let rf: Vec<f64> = (0..len).map(|k| ((k * 37 % 11) as f64 - 5.0) * 0.01).collect();
        let rg: Vec<f64> = (0..len).map(|k| ((k * 13 % 7) as f64 - 3.0) * 0.02).collect();
        let (df, dg) = op.solve(&rf, &rg, 30).unwrap();
        let (af, ag) = op.apply(&df, &dg);
        let err = af
            .iter()
            .zip(&rf)
            .chain(ag.iter().zip(&rg))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = rf.iter().chain(&rg).map(|x| x.abs()).fold(0.0, f64::max);
        assert!(err < 1e-9 * scale, "{err}");
    }

    #[test]
    fn round_trip_layout() {
        let x: Vec<f64> = (0..12).map(|k| k as f64).collect();
        assert_eq!(to_cell_major(&to_point_major(&x, 4, 3), 4, 3), x);
    }
}
