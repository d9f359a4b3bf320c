//! Flat quadrature view of a velocity grid: the discrete velocities and weights
//! the solver actually iterates over.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reflection pairing `q <-> q'` with `v_q' = mirror(v_q)` along `axis`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorPairing {
    pub axis: usize,
    pub partner: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub half_v2: Vec<f64>,
    mirror: Option<MirrorPairing>,
}

impl Quadrature {
    pub fn new(dim: usize, points: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Structural(format!("quadrature dimension {dim} unsupported")));
        }
        if points.len() != weights.len() {
            return Err(Error::Structural(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::Structural("empty quadrature".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Structural(format!("non-positive quadrature weight {w}")));
        }
        let mut points = points;
        for p in &mut points {
            for c in p.iter_mut().skip(dim) {
                *c = 0.0;
            }
        }
        let half_v2 = points
            .iter()
            .map(|p| 0.5 * p[..dim].iter().map(|c| c * c).sum::<f64>())
            .collect();
        Ok(Quadrature {
            dim,
            points,
            weights,
            half_v2,
            mirror: None,
        })
    }

    /// Attach a reflection pairing, failing unless every point has an exact mirror
    /// partner with an identical weight.
    pub fn with_mirror(mut self, axis: usize) -> Result<Self> {
        self.mirror = Some(MirrorPairing {
            axis,
            partner: mirror_partners(&self.points, &self.weights, self.dim, axis)?,
        });
        Ok(self)
    }

    pub(crate) fn with_pairing(mut self, pairing: Option<MirrorPairing>) -> Result<Self> {
        if let Some(p) = pairing {
            if p.partner.len() != self.len() {
                return Err(Error::Structural("symmetry pairing length mismatch".into()));
            }
            for (q, &qp) in p.partner.iter().enumerate() {
                if qp >= self.len() || p.partner[qp] != q {
                    return Err(Error::Structural("symmetry pairing is not an involution".into()));
                }
            }
            self.mirror = Some(p);
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mirror(&self) -> Option<&MirrorPairing> {
        self.mirror.as_ref()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Smallest and largest coordinate along each axis.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                self.points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[k]), hi.max(p[k]))
                    })
            })
            .collect()
    }
}

fn key(p: &[f64; 3]) -> [u64; 3] {
    // +0.0 and -0.0 must collide.
    p.map(|c| if c == 0.0 { 0 } else { c.to_bits() })
}

pub(crate) fn mirror_partners(points: &[[f64; 3]], weights: &[f64], dim: usize, axis: usize) -> Result<Vec<usize>> {
    if axis >= dim {
        return Err(Error::Structural(format!("mirror axis {axis} outside a {dim}-d grid")));
    }
    let index: HashMap<[u64; 3], usize> = points.iter().enumerate().map(|(q, p)| (key(p), q)).collect();
    points
        .iter()
        .enumerate()
        .map(|(q, p)| {
            let mut m = *p;
            m[axis] = -m[axis];
            let qp = *index.get(&key(&m)).ok_or_else(|| {
                Error::Structural(format!("point {q} at {p:?} has no mirror image along axis {axis}"))
            })?;
            if weights[qp] != weights[q] {
                return Err(Error::Structural(format!(
                    "mirror points {q} and {qp} carry different weights"
                )));
            }
            Ok(qp)
        })
        .collect()
}
