//! Conservative discrete equilibrium.
//!
//! For a state `U` the discrete Maxwellian pair is
//! `M_q = exp(alpha . m(v_q))`, `N_q = (delta/2) (-1/alpha_E) M_q`, with the
//! entropic variable `alpha` chosen so that the discrete moments of `(M, N)`
//! reproduce `U` exactly. The Newton iteration is carried out in a frame
//! centered on the bulk velocity and scaled by the thermal speed
//! (`m_hat = (1, (v - u)/c, |v - u|^2 / (2 c^2))`), which keeps the Jacobian
//! well conditioned for hypersonic states; results are reported in the
//! physical variables.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinetic::{
    collision_invariants, primitive_from_conserved, ConservedState, GasModel, MomentVector, PrimitiveState, MAX_MOMENTS,
};
use crate::linalg::{Mat, SmallLu};
use crate::quadrature::Quadrature;

const PIVOT_TOL: f64 = 1e-13;
const MAX_HALVINGS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 50,
        }
    }
}

/// Multipliers of `m(v) = (1, v, |v|^2/2)`; entry `dv + 1` is the energy multiplier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropicVariable(pub MomentVector);

impl EntropicVariable {
    pub fn energy(&self, gas: &GasModel) -> f64 {
        self.0[gas.energy_index()]
    }

    /// `exp(alpha . m(v))`.
    pub fn eval(&self, v: &[f64; 3], dim: usize) -> f64 {
        let m = collision_invariants(v, dim);
        (0..dim + 2).map(|k| self.0[k] * m[k]).sum::<f64>().exp()
    }
}

/// Exponent of the continuous Maxwellian written as `exp(alpha . m(v))`.
pub fn initial_alpha(p: &PrimitiveState, gas: &GasModel) -> EntropicVariable {
    let rt = gas.r * p.t;
    let d = gas.dv;
    let u2: f64 = p.u[..d].iter().map(|c| c * c).sum();
    let mut a = [0.0; MAX_MOMENTS];
    a[0] = (p.rho / (2.0 * PI * rt).powf(d as f64 / 2.0)).ln() - u2 / (2.0 * rt);
    for k in 0..d {
        a[k + 1] = p.u[k] / rt;
    }
    a[d + 1] = -1.0 / rt;
    EntropicVariable(a)
}

/// Centered and scaled moment frame of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Frame {
    pub rho: f64,
    pub u: [f64; 3],
    pub c: f64,
    pub energy: f64,
    pub vref: f64,
}

impl Frame {
    fn new(p: &PrimitiveState, gas: &GasModel, energy: f64) -> Self {
        let c = (gas.r * p.t).sqrt();
        let speed = p.u[..gas.dv].iter().map(|x| x * x).sum::<f64>().sqrt();
        Frame {
            rho: p.rho,
            u: p.u,
            c,
            energy,
            vref: speed.max(c),
        }
    }

    #[inline]
    pub fn m_hat(&self, v: &[f64; 3], dim: usize) -> MomentVector {
        let mut m = [0.0; MAX_MOMENTS];
        m[0] = 1.0;
        let mut s = 0.0;
        for k in 0..dim {
            let x = (v[k] - self.u[k]) / self.c;
            m[k + 1] = x;
            s += x * x;
        }
        m[dim + 1] = 0.5 * s;
        m
    }

    /// `L dU`: physical moment perturbation expressed in the frame.
    pub fn in_frame(&self, du: &MomentVector, dim: usize) -> MomentVector {
        let mut h = [0.0; MAX_MOMENTS];
        h[0] = du[0];
        let mut udot = 0.0;
        let mut u2 = 0.0;
        for k in 0..dim {
            h[k + 1] = (du[k + 1] - self.u[k] * du[0]) / self.c;
            udot += self.u[k] * du[k + 1];
            u2 += self.u[k] * self.u[k];
        }
        h[dim + 1] = (du[dim + 1] - udot + 0.5 * u2 * du[0]) / (self.c * self.c);
        h
    }

    /// Inverse of [`Frame::in_frame`].
    pub fn out_of_frame(&self, h: &MomentVector, dim: usize) -> MomentVector {
        let mut p = [0.0; MAX_MOMENTS];
        p[0] = h[0];
        let mut udot = 0.0;
        let mut u2 = 0.0;
        for k in 0..dim {
            p[k + 1] = self.c * h[k + 1] + self.u[k] * h[0];
            udot += self.u[k] * h[k + 1];
            u2 += self.u[k] * self.u[k];
        }
        p[dim + 1] = self.c * self.c * h[dim + 1] + self.c * udot + 0.5 * u2 * h[0];
        p
    }

    /// Physical multipliers from frame multipliers (`alpha = L^T alpha_hat`).
    pub fn alpha_from_hat(&self, ah: &MomentVector, dim: usize) -> MomentVector {
        let c = self.c;
        let ae = ah[dim + 1];
        let mut a = [0.0; MAX_MOMENTS];
        let mut s = 0.0;
        let mut u2 = 0.0;
        for k in 0..dim {
            a[k + 1] = ah[k + 1] / c - ae * self.u[k] / (c * c);
            s += ah[k + 1] * self.u[k];
            u2 += self.u[k] * self.u[k];
        }
        a[0] = ah[0] - s / c + ae * u2 / (2.0 * c * c);
        a[dim + 1] = ae / (c * c);
        a
    }

    pub fn hat_from_alpha(&self, a: &MomentVector, dim: usize) -> MomentVector {
        let c = self.c;
        let ae = a[dim + 1];
        let mut h = [0.0; MAX_MOMENTS];
        let mut s = 0.0;
        let mut u2 = 0.0;
        for k in 0..dim {
            h[k + 1] = c * (a[k + 1] + ae * self.u[k]);
            s += a[k + 1] * self.u[k];
            u2 += self.u[k] * self.u[k];
        }
        h[0] = a[0] + s + 0.5 * ae * u2;
        h[dim + 1] = ae * c * c;
        h
    }

    /// Max-norm of the frame residual rescaled component-wise by `(rho, rho vref, E)`.
    fn scaled_norm(&self, g_hat: &MomentVector, dim: usize) -> f64 {
        let mut g = *g_hat;
        for x in g.iter_mut() {
            *x *= self.rho;
        }
        let p = self.out_of_frame(&g, dim);
        let mut r = (p[0] / self.rho).abs();
        for k in 0..dim {
            r = r.max((p[k + 1] / (self.rho * self.vref)).abs());
        }
        r.max((p[dim + 1] / self.energy).abs())
    }
}

/// Result of one conservative projection, without the per-point arrays.
#[derive(Clone, Copy, Debug)]
pub struct EquilibriumSummary {
    pub(crate) frame: Frame,
    pub(crate) alpha_hat: MomentVector,
    /// Frame Jacobian divided by `rho`, factored.
    pub(crate) lu: SmallLu,
    pub alpha: EntropicVariable,
    pub residual_norm: f64,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct DiscreteEquilibrium {
    pub alpha: EntropicVariable,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    summary: EquilibriumSummary,
}

impl DiscreteEquilibrium {
    pub fn summary(&self) -> &EquilibriumSummary {
        &self.summary
    }
}

/// Solves the conservative projection for `u` on `quad`.
pub fn solve_discrete_equilibrium(
    u: &ConservedState,
    quad: &Quadrature,
    gas: &GasModel,
    opts: &NewtonOptions,
) -> Result<DiscreteEquilibrium> {
    let mut m = vec![0.0; quad.len()];
    let mut n = vec![0.0; quad.len()];
    let summary = solve_into(&u.to_vector(gas.dv), quad, gas, opts, None, &mut m, &mut n)?;
    Ok(DiscreteEquilibrium {
        alpha: summary.alpha,
        m,
        n,
        residual_norm: summary.residual_norm,
        newton_iterations: summary.newton_iterations,
        summary,
    })
}

struct Evaluation {
    g_hat: MomentVector,
    a_hat: Mat,
    norm: f64,
}

/// One pass over the quadrature: fills `m_out`/`n_out` at `ah` and returns the
/// frame residual and Jacobian (both divided by `rho`).
fn evaluate(
    ah: &MomentVector,
    frame: &Frame,
    target: &MomentVector,
    quad: &Quadrature,
    gas: &GasModel,
    m_out: &mut [f64],
    n_out: &mut [f64],
) -> Evaluation {
    let dim = quad.dim();
    let nm = dim + 2;
    let ie = dim + 1;
    let ae = ah[ie];
    // N_hat = kappa M, N = c^2 N_hat.
    let kappa = 0.5 * gas.effective_internal_dof() / (-ae);
    let c2 = frame.c * frame.c;
    let mut gm = [0.0; MAX_MOMENTS];
    let mut a = [[0.0; MAX_MOMENTS]; MAX_MOMENTS];
    for q in 0..quad.len() {
        let mh = frame.m_hat(&quad.points[q], dim);
        let mut e = 0.0;
        for k in 0..nm {
            e += ah[k] * mh[k];
        }
        let mq = e.exp();
        m_out[q] = mq;
        n_out[q] = kappa * c2 * mq;
        let mw = mq * quad.weights[q];
        for i in 0..nm {
            let x = mh[i] * mw;
            gm[i] += x;
            for j in i..nm {
                a[i][j] += x * mh[j];
            }
        }
    }
    let inv_rho = 1.0 / frame.rho;
    for i in 0..nm {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let mut g = [0.0; MAX_MOMENTS];
    for i in 0..nm {
        g[i] = gm[i] * inv_rho;
        for j in 0..nm {
            a[i][j] *= inv_rho;
        }
    }
    // Energy row picks up the internal-energy carrier: e_E (m_hat - e_E/alpha_E)^T N_hat.
    for j in 0..nm {
        a[ie][j] += kappa * g[j];
    }
    a[ie][ie] -= kappa * g[0] / ae;
    g[ie] += kappa * g[0];
    for i in 0..nm {
        g[i] -= target[i];
    }
    let norm = if g.iter().all(|x| x.is_finite()) {
        frame.scaled_norm(&g, dim)
    } else {
        f64::INFINITY
    };
    Evaluation {
        g_hat: g,
        a_hat: a,
        norm,
    }
}

/// Newton solve writing `M_q`, `N_q` into the given buffers. `warm` is a
/// previously converged physical entropic variable used as the starting point.
pub(crate) fn solve_into(
    u: &MomentVector,
    quad: &Quadrature,
    gas: &GasModel,
    opts: &NewtonOptions,
    warm: Option<&EntropicVariable>,
    m_out: &mut [f64],
    n_out: &mut [f64],
) -> Result<EquilibriumSummary> {
    let dim = gas.dv;
    if quad.dim() != dim {
        return Err(Error::Structural(format!(
            "gas velocity dimension {dim} but {}-d quadrature",
            quad.dim()
        )));
    }
    if quad.len() < dim + 2 {
        return Err(Error::GridInadequacy(format!(
            "{} velocity points cannot carry {} moments",
            quad.len(),
            dim + 2
        )));
    }
    let state = ConservedState::from_vector(u, dim);
    let prim = primitive_from_conserved(&state, gas)?;
    let frame = Frame::new(&prim, gas, state.energy);
    let ie = dim + 1;
    let mut target = [0.0; MAX_MOMENTS];
    target[0] = 1.0;
    target[ie] = gas.energy_factor();

    let mut ah = [0.0; MAX_MOMENTS];
    ah[0] = (prim.rho / (2.0 * PI * frame.c * frame.c).powf(dim as f64 / 2.0)).ln();
    ah[ie] = -1.0;
    let mut ev = evaluate(&ah, &frame, &target, quad, gas, m_out, n_out);
    // A stale multiplier is only kept when it beats the continuous Maxwellian.
    if let Some(a) = warm.filter(|a| a.0[ie] < 0.0 && a.0.iter().all(|x| x.is_finite())) {
        let wh = frame.hat_from_alpha(&a.0, dim);
        let wev = evaluate(&wh, &frame, &target, quad, gas, m_out, n_out);
        if wev.norm < ev.norm {
            ah = wh;
            ev = wev;
        } else {
            ev = evaluate(&ah, &frame, &target, quad, gas, m_out, n_out);
        }
    }
    let mut iterations = 0;
    loop {
        let lu = SmallLu::factor(&ev.a_hat, dim + 2, PIVOT_TOL).ok_or_else(|| {
            Error::GridInadequacy(format!(
                "singular moment Jacobian for rho {:.4e}, u {:?}, T {:.4e}",
                prim.rho, prim.u, prim.t
            ))
        })?;
        if ev.norm <= opts.tol {
            return Ok(EquilibriumSummary {
                frame,
                alpha_hat: ah,
                lu,
                alpha: EntropicVariable(frame.alpha_from_hat(&ah, dim)),
                residual_norm: ev.norm,
                newton_iterations: iterations,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: ev.norm,
            });
        }
        iterations += 1;
        let step = lu.solve(&ev.g_hat);
        let mut lambda = 1.0;
        let mut accepted = None;
        for h in 0..=MAX_HALVINGS {
            let mut trial = ah;
            for k in 0..dim + 2 {
                trial[k] -= lambda * step[k];
            }
            if trial[ie] < 0.0 {
                let tev = evaluate(&trial, &frame, &target, quad, gas, m_out, n_out);
                if tev.norm < ev.norm || (h == MAX_HALVINGS && tev.norm.is_finite()) {
                    accepted = Some((trial, tev));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, tev)) => {
                ah = trial;
                ev = tev;
            }
            None => {
                return Err(Error::GridInadequacy(format!(
                    "no admissible Newton step for rho {:.4e}, u {:?}, T {:.4e}",
                    prim.rho, prim.u, prim.t
                )))
            }
        }
    }
}

/// Linearization of `U -> (M_q(U), N_q(U))` at a converged equilibrium.
#[derive(Clone, Copy, Debug)]
pub struct EquilibriumJacobian {
    frame: Frame,
    dim: usize,
    alpha_e_hat: f64,
    /// `(rho A_hat)^{-1}`.
    b: Mat,
    /// `B e_E / c^2`, used by the `g` diagonal.
    z: MomentVector,
}

impl EquilibriumJacobian {
    pub fn new(summary: &EquilibriumSummary, dim: usize) -> Self {
        let frame = summary.frame;
        let mut b = summary.lu.inverse();
        for row in b.iter_mut() {
            for x in row.iter_mut() {
                *x /= frame.rho;
            }
        }
        let ie = dim + 1;
        let mut z = [0.0; MAX_MOMENTS];
        for (i, zi) in z.iter_mut().enumerate().take(dim + 2) {
            *zi = b[i][ie] / (frame.c * frame.c);
        }
        EquilibriumJacobian {
            frame,
            dim,
            alpha_e_hat: summary.alpha_hat[ie],
            b,
            z,
        }
    }

    /// `w = A^{-1} dU` in frame variables; feed to [`Self::dm`] / [`Self::dn`].
    #[inline]
    pub fn direction(&self, du: &MomentVector) -> MomentVector {
        let h = self.frame.in_frame(du, self.dim);
        let n = self.dim + 2;
        let mut w = [0.0; MAX_MOMENTS];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += self.b[i][j] * h[j];
            }
            w[i] = s;
        }
        w
    }

    #[inline]
    pub fn m_hat(&self, v: &[f64; 3]) -> MomentVector {
        self.frame.m_hat(v, self.dim)
    }

    /// `dM_q = M_q m_hat_q . w`.
    #[inline]
    pub fn dm(&self, mq: f64, mh: &MomentVector, w: &MomentVector) -> f64 {
        mq * (0..self.dim + 2).map(|k| mh[k] * w[k]).sum::<f64>()
    }

    /// `dN_q = N_q (m_hat_q . w - w_E / alpha_E)`.
    #[inline]
    pub fn dn(&self, nq: f64, mh: &MomentVector, w: &MomentVector) -> f64 {
        let ie = self.dim + 1;
        nq * ((0..self.dim + 2).map(|k| mh[k] * w[k]).sum::<f64>() - w[ie] / self.alpha_e_hat)
    }

    /// `D^f_q = M_q m_q A^{-1} m_q^T w_q`.
    #[inline]
    pub fn diag_f(&self, mq: f64, mh: &MomentVector, weight: f64) -> f64 {
        let n = self.dim + 2;
        let mut s = 0.0;
        for i in 0..n {
            let mut r = 0.0;
            for j in 0..n {
                r += self.b[i][j] * mh[j];
            }
            s += mh[i] * r;
        }
        mq * weight * s
    }

    /// `D^g_q = N_q (m_q - e_E/alpha_E) A^{-1} e_E^T w_q`.
    #[inline]
    pub fn diag_g(&self, nq: f64, mh: &MomentVector, weight: f64) -> f64 {
        let ie = self.dim + 1;
        let s: f64 = (0..self.dim + 2).map(|k| mh[k] * self.z[k]).sum::<f64>() - self.z[ie] / self.alpha_e_hat;
        nq * weight * s
    }

    /// The physical moment Jacobian `A(U) = dU/d alpha`.
    pub fn a_matrix(&self) -> Mat {
        // A = L^{-1} (rho A_hat) L^{-T}; rho A_hat = B^{-1}.
        let n = self.dim + 2;
        let lu = SmallLu::factor(&self.b, n, 0.0).expect("inverse of a factored matrix is regular");
        let rho_a_hat = lu.inverse();
        let mut tmp = [[0.0; MAX_MOMENTS]; MAX_MOMENTS];
        // Columns: L^{-1} applied to each column.
        for j in 0..n {
            let col: MomentVector = std::array::from_fn(|i| if i < n { rho_a_hat[i][j] } else { 0.0 });
            let p = self.frame.out_of_frame(&col, self.dim);
            for i in 0..n {
                tmp[i][j] = p[i];
            }
        }
        let mut a = [[0.0; MAX_MOMENTS]; MAX_MOMENTS];
        for i in 0..n {
            let row: MomentVector = std::array::from_fn(|j| if j < n { tmp[i][j] } else { 0.0 });
            let p = self.frame.out_of_frame(&row, self.dim);
            a[i][..n].copy_from_slice(&p[..n]);
        }
        a
    }
}

/// Jacobian products at a converged equilibrium; see [`EquilibriumJacobian`].
pub fn equilibrium_jacobian_products(eq: &DiscreteEquilibrium, gas: &GasModel) -> EquilibriumJacobian {
    EquilibriumJacobian::new(&eq.summary, gas.dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::{maxwellian_value, moments};

    fn uniform_quad(dim: usize, lo: f64, hi: f64, n: usize) -> Quadrature {
        let h = (hi - lo) / (n - 1) as f64;
        let mut pts = Vec::new();
        let mut w = Vec::new();
        let count = n.pow(dim as u32);
        for idx in 0..count {
            let mut p = [0.0; 3];
            let mut wt = 1.0;
            let mut r = idx;
            for c in p.iter_mut().take(dim) {
                let i = r % n;
                r /= n;
                *c = lo + i as f64 * h;
                wt *= if i == 0 || i == n - 1 { 0.5 * h } else { h };
            }
            pts.push(p);
            w.push(wt);
        }
        Quadrature::new(dim, pts, w).unwrap()
    }

    #[test]
    fn initial_alpha_reproduces_maxwellian() {
        let gas = GasModel {
            r: 1.0,
            ..GasModel::argon(2)
        };
        let p = PrimitiveState::new(1.0, [0.0; 3], 1.0);
        let a = initial_alpha(&p, &gas);
        assert!((a.0[0] + (2.0 * PI).ln()).abs() < 1e-15);
        assert_eq!(&a.0[1..4], &[0.0, 0.0, -1.0]);

        let p = PrimitiveState::new(2.0, [3.0, -1.5, 0.0], 2.0);
        let a = initial_alpha(&p, &gas);
        assert!((a.0[1] - 1.5).abs() < 1e-15 && (a.0[2] + 0.75).abs() < 1e-15);
        for v in [[0.0, 0.0, 0.0], [3.5, -1.0, 0.0], [1.0, 2.0, 0.0]] {
            let m = maxwellian_value(&p, &v, &gas);
            assert!((a.eval(&v, 2) - m).abs() <= 1e-14 * m);
        }
    }

    #[test]
    fn frame_transforms_invert() {
        let gas = GasModel::argon(3);
        let p = PrimitiveState::new(1e-3, [5000.0, -200.0, 30.0], 800.0);
        let f = Frame::new(&p, &gas, 1.0);
        let x = [0.3, -1.0, 2.0, 0.7, 5.0];
        let back = f.out_of_frame(&f.in_frame(&x, 3), 3);
        for k in 0..5 {
            assert!((back[k] - x[k]).abs() < 1e-9 * x[k].abs().max(1.0));
        }
        // Physically scaled multipliers: exp(alpha . m) is O(1) near the bulk velocity.
        let q = PrimitiveState::new(1e-3, [4900.0, -150.0, 10.0], 900.0);
        let x = initial_alpha(&q, &gas).0;
        let h = f.hat_from_alpha(&x, 3);
        let a = f.alpha_from_hat(&h, 3);
        let v = [5100.0, -120.0, 40.0];
        let m = collision_invariants(&v, 3);
        let lhs: f64 = (0..5).map(|k| x[k] * m[k]).sum();
        let rhs: f64 = (0..5).map(|k| a[k] * m[k]).sum();
        let hat: f64 = (0..5).map(|k| h[k] * f.m_hat(&v, 3)[k]).sum();
        assert!((lhs - rhs).abs() < 1e-8 * lhs.abs().max(1.0));
        assert!((lhs - hat).abs() < 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn converges_near_continuous_alpha_on_wide_grid() {
        let gas = GasModel::argon(2);
        let p = PrimitiveState::new(1e-4, [200.0, -100.0, 0.0], 300.0);
        let s = (gas.r * p.t).sqrt();
        // Nodes spaced 0.5 s over +-8 s around the origin (the bulk velocity is
        // inside the box).
        let quad = uniform_quad(2, -8.0 * s, 8.0 * s, 33);
        let mut f = vec![0.0; quad.len()];
        let mut g = vec![0.0; quad.len()];
        for q in 0..quad.len() {
            f[q] = maxwellian_value(&p, &quad.points[q], &gas);
            g[q] = 0.5 * gas.effective_internal_dof() * gas.r * p.t * f[q];
        }
        let u = moments(&f, &g, &quad).unwrap();
        let eq = solve_discrete_equilibrium(&u, &quad, &gas, &NewtonOptions::default()).unwrap();
        assert!(eq.newton_iterations <= 5, "{}", eq.newton_iterations);
        let a0 = initial_alpha(&p, &gas);
        let scale = [1.0, s, s, s * s];
        for k in 0..4 {
            // Compare in units where alpha . m is O(1).
            let d = (eq.alpha.0[k] - a0.0[k]) * if k == 0 { 1.0 } else { scale[k] };
            assert!(d.abs() < 1e-6, "component {k}: {d}");
        }
        let back = moments(&eq.m, &eq.n, &quad).unwrap();
        assert!((back.rho - u.rho).abs() <= 1e-10 * u.rho);
        assert!((back.energy - u.energy).abs() <= 1e-10 * u.energy);
    }

    #[test]
    fn single_velocity_grid_is_inadequate() {
        let gas = GasModel::argon(2);
        let quad = Quadrature::new(2, vec![[1.0, 1.0, 0.0]; 6], vec![1.0; 6]).unwrap();
        let u = ConservedState::from_primitive(&PrimitiveState::new(1.0, [1.0, 1.0, 0.0], 1.0), &gas);
        assert!(matches!(
            solve_discrete_equilibrium(&u, &quad, &gas, &NewtonOptions::default()),
            Err(Error::GridInadequacy(_))
        ));
    }

    #[test]
    fn monoatomic_three_d_has_no_internal_carrier() {
        let gas = GasModel::argon(3);
        let p = PrimitiveState::new(1.0, [50.0, 0.0, -20.0], 250.0);
        let s = (gas.r * p.t).sqrt();
        let quad = uniform_quad(3, -6.0 * s, 6.0 * s, 13);
        let u = ConservedState::from_primitive(&p, &gas);
        let eq = solve_discrete_equilibrium(&u, &quad, &gas, &NewtonOptions::default()).unwrap();
        assert!(eq.n.iter().all(|&x| x == 0.0));
        let jac = equilibrium_jacobian_products(&eq, &gas);
        let w = jac.direction(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        for q in 0..quad.len() {
            let mh = jac.m_hat(&quad.points[q]);
            assert_eq!(jac.dn(eq.n[q], &mh, &w), 0.0);
        }
    }
}
