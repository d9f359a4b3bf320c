//! Analytic bow-shock field around a circular cylinder.
//!
//! A stand-in for a continuum pre-simulation: a smooth shock of finite width
//! at radius `R_s(theta) = R_b + standoff (1 + flare theta^2)`, normal-shock
//! jumps on the velocity component normal to that curve, and a shock layer in
//! which the radial velocity vanishes linearly toward the wall while the
//! temperature relaxes to the wall value at constant pressure. The temperature front
//! runs `lead` shock widths ahead of the velocity front, the way the
//! temperature rises first in a strong viscous shock.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinetic::{GasModel, PrimitiveState};
use crate::solver::SpaceMesh2D;
use crate::velocity::{normal_shock_ratios, MacroField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CylinderSurrogate {
    pub body_radius: f64,
    pub upstream: PrimitiveState,
    pub wall_t: f64,
    /// Shock distance from the wall on the stagnation line, m.
    pub standoff: f64,
    /// Growth of the shock distance with the angle (per rad^2).
    pub flare: f64,
    /// Shock half-thickness, m.
    pub width: f64,
    /// Offset of the temperature front, in shock widths.
    pub lead: f64,
    /// Fraction of the normal-shock temperature jump reached in the shock layer.
    pub recovery: f64,
    /// Thickness of the thermal wall layer as a fraction of the shock layer.
    pub thermal_layer: f64,
    /// Thickness of the velocity wall layer as a fraction of the shock layer.
    pub velocity_layer: f64,
}

impl Default for CylinderSurrogate {
    fn default() -> Self {
        CylinderSurrogate {
            body_radius: 0.1,
            upstream: PrimitiveState::new(3.17e-6, [5.81e3, 0.0, 0.0], 242.4),
            wall_t: 293.0,
            standoff: 0.05,
            flare: 0.75,
            width: 0.01,
            lead: 4.0,
            recovery: 0.85,
            thermal_layer: 0.02,
            velocity_layer: 0.2,
        }
    }
}

impl CylinderSurrogate {
    /// State at `(x, y)`; the body is centered at the origin with the flow along `+x`.
    pub fn state(&self, x: f64, y: f64, gas: &GasModel) -> Result<PrimitiveState> {
        let up = self.upstream;
        let speed = up.speed();
        let r = x.hypot(y).max(self.body_radius);
        let theta = y.abs().atan2(-x);
        let sgn = if y < 0.0 { -1.0 } else { 1.0 };
        let rs = self.body_radius + self.standoff * (1.0 + self.flare * theta * theta);

        // Unit shock normal (outward) of the curve r = R_s(theta), in (e_r, e_theta).
        let drs = 2.0 * self.standoff * self.flare * theta;
        let nl = rs.hypot(drs);
        let (n_r, n_t) = (rs / nl, -drs / nl);
        let (c, sn) = (theta.cos(), theta.sin());
        // Upstream velocity in (e_r, e_theta) with e_r = (-cos, sin), e_theta = (sin, cos).
        let (u_r, u_t) = (-speed * c, speed * sn);
        let un = u_r * n_r + u_t * n_t;
        let mach_n = (-un / gas.sound_speed(up.t)).max(1.0);
        let (rho_ratio, _, t_ratio) = normal_shock_ratios(gas.gamma(), mach_n)?;
        let dun = un / rho_ratio - un;
        let ur_post = u_r + dun * n_r;
        let ut_post = u_t + dun * n_t;
        let t_post = up.t + self.recovery * (up.t * t_ratio - up.t);
        let p_post = up.rho * rho_ratio * gas.r * up.t * t_ratio;

        let xi = ((r - self.body_radius) / (rs - self.body_radius)).clamp(0.0, 1.0);
        let ur = ur_post * xi;
        let ut = ut_post * (1.0 - (-xi / self.velocity_layer).exp());
        let t_layer = self.wall_t + (t_post - self.wall_t) * (1.0 - (-xi / self.thermal_layer).exp());
        let rho_layer = p_post / (gas.r * t_layer);

        // The upstream share vanishes on the wall so the wall state is exact.
        let s = (r - rs) / self.width;
        let h_u = 1.0 - 0.5 * (1.0 + s.tanh()) * xi;
        let h_t = 1.0 - 0.5 * (1.0 + (s - self.lead).tanh()) * xi;
        let layer_u = [-ur * c + ut * sn, sgn * (ur * sn + ut * c)];
        let u = [
            (1.0 - h_u) * up.u[0] + h_u * layer_u[0],
            (1.0 - h_u) * up.u[1] + h_u * layer_u[1],
            0.0,
        ];
        let rho = (1.0 - h_u) * up.rho + h_u * rho_layer;
        let t = (1.0 - h_t) * up.t + h_t * t_layer;
        Ok(PrimitiveState::new(rho, u, t))
    }

    /// Field file text with the surrogate parameters and the field extrema
    /// as leading comments.
    pub fn annotated_text(&self, field: &MacroField, mesh_note: &str) -> String {
        let e = field.extrema();
        let mut s = String::new();
        let _ = writeln!(s, "# analytic bow-shock surrogate around a circular cylinder");
        let _ = writeln!(
            s,
            "# surrogate {}",
            serde_json::to_string(self).expect("parameters serialize")
        );
        for line in mesh_note.lines() {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "# extrema rho {:.17e} {:.17e}", e.rho.0, e.rho.1);
        for (k, name) in ["u_x", "u_y", "u_z"].iter().enumerate().take(e.u.len()) {
            let _ = writeln!(s, "# extrema {name} {:.17e} {:.17e}", e.u[k].0, e.u[k].1);
        }
        let _ = writeln!(s, "# extrema T {:.17e} {:.17e}", e.t.0, e.t.1);
        s.push_str(&field.to_text());
        s
    }

    /// Field sampled at the cell centroids of `mesh`.
    pub fn field_on(&self, mesh: &SpaceMesh2D, gas: &GasModel) -> Result<MacroField> {
        let cells = mesh
            .centroid
            .iter()
            .map(|c| self.state(c[0], c[1], gas))
            .collect::<Result<Vec<_>>>()?;
        let centroids = mesh.centroid.iter().map(|c| [c[0], c[1], 0.0]).collect();
        MacroField::new(vec![mesh.ni, mesh.nj], cells, Some(centroids), 2)
    }
}
