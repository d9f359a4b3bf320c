//! Global uniform velocity grid sized from the macroscopic field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::velocity::MacroField;

/// Uniform Cartesian velocity grid. Node `i` on axis `k` sits at
/// `mid[k] + (2 i - steps[k]) * dv / 2`, so a grid with `mid = 0` is exactly
/// mirror symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineGridSpec {
    pub v_min: Vec<f64>,
    pub v_max: Vec<f64>,
    pub dv: f64,
    /// Node counts per axis.
    pub n: Vec<usize>,
    pub p0_extended: bool,
}

impl FineGridSpec {
    fn from_axes(axes: &[(f64, usize)], dv: f64, p0_extended: bool) -> Self {
        let half = 0.5 * dv;
        FineGridSpec {
            v_min: axes.iter().map(|&(m, s)| m - s as f64 * half).collect(),
            v_max: axes.iter().map(|&(m, s)| m + s as f64 * half).collect(),
            dv,
            n: axes.iter().map(|&(_, s)| s + 1).collect(),
            p0_extended,
        }
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self, axis: usize) -> usize {
        self.n[axis] - 1
    }

    pub fn mid(&self, axis: usize) -> f64 {
        0.5 * (self.v_min[axis] + self.v_max[axis])
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.mid(axis) + (2 * i as i64 - self.steps(axis) as i64) as f64 * (0.5 * self.dv)
    }

    /// Per-axis indices of flat node `q` (axis 0 fastest).
    pub fn multi_index(&self, q: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        let mut r = q;
        for (k, &n) in self.n.iter().enumerate() {
            idx[k] = r % n;
            r /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize; 3]) -> usize {
        let mut q = 0;
        for k in (0..self.dim()).rev() {
            q = q * self.n[k] + idx[k];
        }
        q
    }

    pub fn node(&self, q: usize) -> [f64; 3] {
        let idx = self.multi_index(q);
        let mut v = [0.0; 3];
        for (k, x) in v.iter_mut().enumerate().take(self.dim()) {
            *x = self.coord(k, idx[k]);
        }
        v
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.v_max[k] - self.v_min[k]).product()
    }
}

/// Number of steps covering `span`; a relative slack absorbs round-off in
/// spans that are already whole multiples of `dv`.
fn step_count(span: f64, dv: f64) -> usize {
    ((span / dv) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn check_params(field: &MacroField, c: f64, a: f64) -> Result<()> {
    if field.is_empty() {
        return Err(Error::Structural("empty macro field".into()));
    }
    if !(c.is_finite() && c > 0.0) || !(a.is_finite() && a > 0.0) {
        return Err(Error::Validation(format!(
            "c and a must be positive (c = {c}, a = {a})"
        )));
    }
    Ok(())
}

/// Bounds `min/max(u + -c sqrt(RT))` and step `a min sqrt(RT)` over the field,
/// widened symmetrically to a whole number of steps.
pub fn fine_grid_spec(
    field: &MacroField,
    r: f64,
    dim: usize,
    c: f64,
    a: f64,
    extend_for_p0: bool,
) -> Result<FineGridSpec> {
    check_params(field, c, a)?;
    if !(1..=3).contains(&dim) {
        return Err(Error::Structural(format!("velocity dimension {dim} unsupported")));
    }
    let psi = field.thermal_speeds(r);
    let dv = a * psi.iter().copied().fold(f64::INFINITY, f64::min);
    let axes: Vec<(f64, usize)> = (0..dim)
        .map(|k| {
            let (lo, hi) = field
                .cells
                .iter()
                .zip(&psi)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (cell, s)| {
                    (lo.min(cell.u[k] - c * s), hi.max(cell.u[k] + c * s))
                });
            let steps = step_count(hi - lo, dv) + if extend_for_p0 { 2 } else { 0 };
            (0.5 * (lo + hi), steps)
        })
        .collect();
    Ok(FineGridSpec::from_axes(&axes, dv, extend_for_p0))
}

/// Axisymmetric bounds in `(v_x, zeta)`: `zeta` runs from 0 to
/// `max(|u_r| + c sqrt(RT))`.
pub fn fine_grid_spec_axisym(field: &MacroField, r: f64, c: f64, a: f64, extend_for_p0: bool) -> Result<FineGridSpec> {
    check_params(field, c, a)?;
    let psi = field.thermal_speeds(r);
    let dv = a * psi.iter().copied().fold(f64::INFINITY, f64::min);
    let (xlo, xhi, zhi) =
        field
            .cells
            .iter()
            .zip(&psi)
            .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |(xl, xh, zh), (cell, s)| {
                (
                    xl.min(cell.u[0] - c * s),
                    xh.max(cell.u[0] + c * s),
                    zh.max(cell.u[1].abs() + c * s),
                )
            });
    let mut xs = step_count(xhi - xlo, dv);
    let mut zs = step_count(zhi, dv);
    if extend_for_p0 {
        xs += 2;
        zs += 1;
    }
    let zmid = zs as f64 * (0.5 * dv);
    Ok(FineGridSpec::from_axes(
        &[(0.5 * (xlo + xhi), xs), (zmid, zs)],
        dv,
        extend_for_p0,
    ))
}
