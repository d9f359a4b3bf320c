//! Three-state field estimate from the normal-shock relations.

use crate::error::{Error, Result};
use crate::kinetic::{GasModel, PrimitiveState};
use crate::velocity::MacroField;

/// Density, velocity and temperature ratios across a stationary normal shock.
pub fn normal_shock_ratios(gamma: f64, mach: f64) -> Result<(f64, f64, f64)> {
    if !(mach.is_finite() && mach >= 1.0) {
        return Err(Error::Domain(format!("upstream Mach number {mach} is not supersonic")));
    }
    let m2 = mach * mach;
    let rho = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let t = (2.0 * gamma * m2 - (gamma - 1.0)) * ((gamma - 1.0) * m2 + 2.0) / ((gamma + 1.0).powi(2) * m2);
    Ok((rho, 1.0 / rho, t))
}

/// Upstream, post-shock and wall states as a three-cell field. The wall cell
/// is at rest at `wall_t` with the post-shock pressure.
pub fn rankine_hugoniot_fields(upstream: &PrimitiveState, wall_t: f64, gas: &GasModel) -> Result<MacroField> {
    upstream.validate()?;
    if !(wall_t.is_finite() && wall_t > 0.0) {
        return Err(Error::Validation(format!(
            "wall temperature must be positive, got {wall_t}"
        )));
    }
    let mach = upstream.speed() / gas.sound_speed(upstream.t);
    let (rr, ur, tr) = normal_shock_ratios(gas.gamma(), mach)?;
    let down = PrimitiveState::new(upstream.rho * rr, upstream.u.map(|c| c * ur), upstream.t * tr);
    let wall = PrimitiveState::new(down.rho * down.t / wall_t, [0.0; 3], wall_t);
    MacroField::from_states(vec![*upstream, down, wall], gas.dv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mach_three_monoatomic() {
        let (r, u, t) = normal_shock_ratios(5.0 / 3.0, 3.0).unwrap();
        assert!((r - 3.0).abs() < 1e-14);
        assert!((u - 1.0 / 3.0).abs() < 1e-14);
        assert!((t - 11.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn sonic_limit_is_trivial() {
        let (r, u, t) = normal_shock_ratios(1.4, 1.0).unwrap();
        for x in [r, u, t] {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn subsonic_is_rejected() {
        let gas = GasModel::argon(2);
        let up = PrimitiveState::new(1e-5, [100.0, 0.0, 0.0], 300.0);
        assert!(matches!(
            rankine_hugoniot_fields(&up, 300.0, &gas),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn argon_mach_twenty() {
        let gas = GasModel::argon(2);
        let t = 242.4;
        let u = 20.0 * gas.sound_speed(t);
        let f = rankine_hugoniot_fields(&PrimitiveState::new(3.17e-6, [u, 0.0, 0.0], t), 293.0, &gas).unwrap();
        assert_eq!(f.len(), 3);
        assert!((f.cells[1].t / t - 3998.0 * 806.0 / 25600.0).abs() < 1e-9);
        assert!((f.cells[1].rho / 3.17e-6 - 1600.0 / 403.0).abs() < 1e-12);
        assert_eq!(f.cells[2].u, [0.0; 3]);
    }
}
