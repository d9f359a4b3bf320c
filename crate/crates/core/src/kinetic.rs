//! Gas model, macroscopic states and the continuous Maxwellian.
//!
//! The solver works with the reduced pair `(f, g)`: `f` carries the mass and
//! the translational energy of the `d_v` resolved velocity components, `g`
//! carries everything else (internal degrees of freedom plus the velocity
//! components that are not discretized). A gas with `delta` internal degrees
//! of freedom discretized on a `d_v`-dimensional velocity grid therefore has
//! `delta + 3 - d_v` "effective" internal degrees seen by `g`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Largest supported number of moments (`1 + 3 + 1`).
pub const MAX_MOMENTS: usize = 5;

/// Moment vector `(rho, rho u_1..rho u_d, E)`; only the first `d + 2` entries are used.
pub type MomentVector = [f64; MAX_MOMENTS];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasModel {
    /// Specific gas constant, J/(kg K).
    pub r: f64,
    /// Reference viscosity, Pa s.
    pub mu_ref: f64,
    /// Reference temperature, K.
    pub t_ref: f64,
    /// Viscosity exponent.
    pub omega_visc: f64,
    /// Internal degrees of freedom of the molecule.
    pub delta: u32,
    /// Dimension of the discrete velocity space (2 or 3).
    pub dv: usize,
}

impl GasModel {
    pub fn new(r: f64, mu_ref: f64, t_ref: f64, omega_visc: f64, delta: u32, dv: usize) -> Result<Self> {
        let gas = GasModel {
            r,
            mu_ref,
            t_ref,
            omega_visc,
            delta,
            dv,
        };
        gas.validate()?;
        Ok(gas)
    }

    /// Argon with the hard-sphere-like VHS viscosity law used for the cylinder case.
    pub fn argon(dv: usize) -> Self {
        GasModel {
            r: 208.13,
            mu_ref: 2.117e-5,
            t_ref: 273.0,
            omega_visc: 0.81,
            delta: 0,
            dv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!("gas: {name} must be positive, got {x}")))
            }
        };
        positive("r", self.r)?;
        positive("mu_ref", self.mu_ref)?;
        positive("t_ref", self.t_ref)?;
        if !(0.5..=1.5).contains(&self.omega_visc) {
            return Err(Error::Validation(format!(
                "gas: omega_visc must lie in [0.5, 1.5], got {}",
                self.omega_visc
            )));
        }
        if !(2..=3).contains(&self.dv) {
            return Err(Error::Validation(format!("gas: dv must be 2 or 3, got {}", self.dv)));
        }
        Ok(())
    }

    /// Internal degrees of freedom carried by `g`.
    pub fn effective_internal_dof(&self) -> f64 {
        (self.delta as usize + 3 - self.dv) as f64
    }

    /// Number of conserved moments, `d_v + 2`.
    pub fn n_moments(&self) -> usize {
        self.dv + 2
    }

    /// Index of the energy moment.
    pub fn energy_index(&self) -> usize {
        self.dv + 1
    }

    /// `(3 + delta) / 2`, the factor in `E = rho |u|^2 / 2 + (3 + delta)/2 rho R T`.
    pub fn energy_factor(&self) -> f64 {
        (3.0 + self.delta as f64) / 2.0
    }

    pub fn gamma(&self) -> f64 {
        (5.0 + self.delta as f64) / (3.0 + self.delta as f64)
    }

    pub fn sound_speed(&self, t: f64) -> f64 {
        (self.gamma() * self.r * t).sqrt()
    }

    pub fn viscosity(&self, t: f64) -> f64 {
        self.mu_ref * (t / self.t_ref).powf(self.omega_visc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: [f64; 3],
    pub t: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: [f64; 3], t: f64) -> Self {
        PrimitiveState { rho, u, t }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::Domain(format!("non-positive density {}", self.rho)));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Domain(format!("non-positive temperature {}", self.t)));
        }
        if self.u.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite velocity {:?}", self.u)));
        }
        Ok(())
    }

    pub fn speed(&self) -> f64 {
        norm(&self.u)
    }

    pub fn pressure(&self, gas: &GasModel) -> f64 {
        self.rho * gas.r * self.t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub momentum: [f64; 3],
    pub energy: f64,
}

impl ConservedState {
    pub fn from_vector(v: &MomentVector, dv: usize) -> Self {
        let mut momentum = [0.0; 3];
        momentum[..dv].copy_from_slice(&v[1..=dv]);
        ConservedState {
            rho: v[0],
            momentum,
            energy: v[dv + 1],
        }
    }

    pub fn to_vector(&self, dv: usize) -> MomentVector {
        let mut v = [0.0; MAX_MOMENTS];
        v[0] = self.rho;
        v[1..=dv].copy_from_slice(&self.momentum[..dv]);
        v[dv + 1] = self.energy;
        v
    }

    pub fn internal_energy(&self) -> f64 {
        self.energy - 0.5 * dot(&self.momentum, &self.momentum) / self.rho
    }

    pub fn from_primitive(p: &PrimitiveState, gas: &GasModel) -> Self {
        let mut momentum = [0.0; 3];
        for (k, m) in momentum.iter_mut().enumerate().take(gas.dv) {
            *m = p.rho * p.u[k];
        }
        let ke: f64 = p.u[..gas.dv].iter().map(|c| c * c).sum::<f64>() * 0.5 * p.rho;
        ConservedState {
            rho: p.rho,
            momentum,
            energy: ke + gas.energy_factor() * p.rho * gas.r * p.t,
        }
    }
}

/// `T = (E - rho |u|^2 / 2) / ((3 + delta)/2 rho R)`.
pub fn primitive_from_conserved(u: &ConservedState, gas: &GasModel) -> Result<PrimitiveState> {
    if !(u.rho.is_finite() && u.rho > 0.0) {
        return Err(Error::Domain(format!("non-positive density {}", u.rho)));
    }
    let mut vel = [0.0; 3];
    for (k, c) in vel.iter_mut().enumerate().take(gas.dv) {
        *c = u.momentum[k] / u.rho;
    }
    let ke: f64 = 0.5 * u.rho * vel.iter().map(|c| c * c).sum::<f64>();
    let internal = u.energy - ke;
    if !(internal.is_finite() && internal > 0.0) {
        return Err(Error::Domain(format!(
            "non-positive internal energy {internal:.6e} (rho {}, E {})",
            u.rho, u.energy
        )));
    }
    Ok(PrimitiveState {
        rho: u.rho,
        u: vel,
        t: internal / (gas.energy_factor() * u.rho * gas.r),
    })
}

/// Collision invariants `m(v) = (1, v, |v|^2 / 2)` for a `dim`-dimensional velocity.
#[inline]
pub fn collision_invariants(v: &[f64; 3], dim: usize) -> MomentVector {
    let mut m = [0.0; MAX_MOMENTS];
    m[0] = 1.0;
    let mut v2 = 0.0;
    for k in 0..dim {
        m[k + 1] = v[k];
        v2 += v[k] * v[k];
    }
    m[dim + 1] = 0.5 * v2;
    m
}

/// Discrete moments `sum_q (m(v_q) f_q + e_E g_q) w_q`, summed in ascending point order.
pub fn moments(f: &[f64], g: &[f64], quad: &Quadrature) -> Result<ConservedState> {
    if f.len() != quad.len() || g.len() != quad.len() {
        return Err(Error::Structural(format!(
            "moments: {} f values and {} g values for a {}-point quadrature",
            f.len(),
            g.len(),
            quad.len()
        )));
    }
    Ok(ConservedState::from_vector(&moment_vector(f, g, quad), quad.dim()))
}

/// Unchecked moment accumulation shared by the solver hot loops.
#[inline]
pub(crate) fn moment_vector(f: &[f64], g: &[f64], quad: &Quadrature) -> MomentVector {
    let dim = quad.dim();
    let mut acc = [0.0; MAX_MOMENTS];
    for q in 0..quad.len() {
        let w = quad.weights[q];
        let fw = f[q] * w;
        let v = &quad.points[q];
        acc[0] += fw;
        for k in 0..dim {
            acc[k + 1] += v[k] * fw;
        }
        acc[dim + 1] += quad.half_v2[q] * fw + g[q] * w;
    }
    acc
}

/// Continuous Maxwellian `rho (2 pi R T)^(-d/2) exp(-|v - u|^2 / (2 R T))` in `gas.dv` dimensions.
pub fn maxwellian_value(p: &PrimitiveState, v: &[f64; 3], gas: &GasModel) -> f64 {
    let rt = gas.r * p.t;
    let d2: f64 = (0..gas.dv).map(|k| (v[k] - p.u[k]).powi(2)).sum();
    p.rho * (2.0 * PI * rt).powf(-(gas.dv as f64) / 2.0) * (-d2 / (2.0 * rt)).exp()
}

/// BGK relaxation time `mu(T) / (rho R T)`.
pub fn relaxation_time(p: &PrimitiveState, gas: &GasModel) -> f64 {
    gas.viscosity(p.t) / (p.rho * gas.r * p.t)
}

/// Hard-sphere style mean free path `mu / rho * sqrt(pi / (2 R T))`.
pub fn mean_free_path(p: &PrimitiveState, gas: &GasModel) -> f64 {
    gas.viscosity(p.t) / p.rho * (PI / (2.0 * gas.r * p.t)).sqrt()
}

#[inline]
pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas2() -> GasModel {
        GasModel::argon(2)
    }

    #[test]
    fn effective_dof_absorbs_missing_velocity_components() {
        let g = GasModel::new(287.0, 1.8e-5, 273.0, 0.75, 2, 2).unwrap();
        assert_eq!(g.effective_internal_dof(), 3.0);
        assert_eq!(g.n_moments(), 4);
        let g3 = GasModel::argon(3);
        assert_eq!(g3.effective_internal_dof(), 0.0);
        assert!((GasModel::argon(2).gamma() - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gas_validation_rejects_bad_parameters() {
        assert!(GasModel::new(-1.0, 1e-5, 273.0, 0.8, 0, 2).is_err());
        assert!(GasModel::new(200.0, 1e-5, 273.0, 2.0, 0, 2).is_err());
        assert!(GasModel::new(200.0, 1e-5, 273.0, 0.8, 0, 4).is_err());
    }

    #[test]
    fn primitive_at_rest() {
        let gas = gas2();
        let u = ConservedState {
            rho: 1.0,
            momentum: [0.0; 3],
            energy: gas.energy_factor() * gas.r * 300.0,
        };
        let p = primitive_from_conserved(&u, &gas).unwrap();
        assert_eq!(p.rho, 1.0);
        assert_eq!(p.u, [0.0; 3]);
        assert!((p.t - 300.0).abs() < 1e-12);
    }

    #[test]
    fn primitive_moving() {
        let gas = gas2();
        let e = 0.5 * 2.0 * 100.0f64.powi(2) + gas.energy_factor() * 2.0 * gas.r * 500.0;
        let u = ConservedState {
            rho: 2.0,
            momentum: [200.0, 0.0, 0.0],
            energy: e,
        };
        let p = primitive_from_conserved(&u, &gas).unwrap();
        assert_eq!(p.u, [100.0, 0.0, 0.0]);
        assert!((p.t - 500.0).abs() < 1e-10);
    }

    #[test]
    fn negative_internal_energy_is_a_domain_error() {
        let gas = gas2();
        let u = ConservedState {
            rho: 1.0,
            momentum: [100.0, 0.0, 0.0],
            energy: 10.0,
        };
        assert!(matches!(primitive_from_conserved(&u, &gas), Err(Error::Domain(_))));
    }

    #[test]
    fn maxwellian_values() {
        let gas = GasModel { r: 1.0, ..gas2() };
        let p = PrimitiveState::new(1.0, [0.0; 3], 1.0);
        let peak = maxwellian_value(&p, &[0.0; 3], &gas);
        assert!((peak - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let v = maxwellian_value(&p, &[1.0, 1.0, 0.0], &gas);
        assert!((v - (-1.0f64).exp() / (2.0 * PI)).abs() < 1e-15);
        assert!((v - 0.058550).abs() < 5e-7);
    }

    #[test]
    fn relaxation_time_cases() {
        let gas = gas2();
        let p = PrimitiveState::new(1.0, [0.0; 3], gas.t_ref);
        assert!((relaxation_time(&p, &gas) - gas.mu_ref / (gas.r * gas.t_ref)).abs() < 1e-20);

        let g1 = GasModel { omega_visc: 1.0, ..gas };
        let a = relaxation_time(&PrimitiveState::new(1.0, [0.0; 3], 100.0), &g1);
        let b = relaxation_time(&PrimitiveState::new(1.0, [0.0; 3], 900.0), &g1);
        assert!((a - b).abs() <= 1e-15 * a);

        let g5 = GasModel { omega_visc: 0.5, ..gas };
        let p = PrimitiveState::new(1e-5, [0.0; 3], 2.0 * g5.t_ref);
        let expected = g5.mu_ref * 2f64.sqrt() / (1e-5 * g5.r * 2.0 * g5.t_ref);
        assert!((relaxation_time(&p, &g5) - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn maxwellian_integrates_to_density() {
        // Midpoint rule over a +-8 sqrt(RT) box.
        let gas = gas2();
        let p = PrimitiveState::new(2.5, [300.0, -120.0, 0.0], 400.0);
        let s = (gas.r * p.t).sqrt();
        let n = 800;
        let h = 16.0 * s / n as f64;
        let mut total = 0.0;
        for a in 0..n {
            for b in 0..n {
                let v = [
                    p.u[0] - 8.0 * s + (a as f64 + 0.5) * h,
                    p.u[1] - 8.0 * s + (b as f64 + 0.5) * h,
                    0.0,
                ];
                total += maxwellian_value(&p, &v, &gas) * h * h;
            }
        }
        assert!((total - p.rho).abs() < 1e-8 * p.rho, "{total}");
    }
}
