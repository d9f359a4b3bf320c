//! Recursive bisection of the velocity box and the Q1/P0 quadratures.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::velocity::{
    AmrVelocityGrid, CoordinateSystem, FineGridSpec, Lattice, Leaf, QuadratureMode, SupportFunction,
};

pub const DEFAULT_MAX_LEVEL: u32 = 12;

/// Refines with the default level cap.
pub fn generate_amr(spec: &FineGridSpec, phi: &SupportFunction, a: f64) -> Result<AmrVelocityGrid> {
    generate_amr_with_cap(spec, phi, a, DEFAULT_MAX_LEVEL)
}

pub fn generate_amr_with_cap(
    spec: &FineGridSpec,
    phi: &SupportFunction,
    a: f64,
    max_level: u32,
) -> Result<AmrVelocityGrid> {
    generate_in(spec, phi, a, max_level, CoordinateSystem::Cartesian { dim: spec.dim() })
}

/// Index range of fine nodes along `axis` inside `[lo, lo + size]` (lattice units).
fn node_range(spec: &FineGridSpec, axis: usize, lo: i64, size: i64, cap: u32) -> Option<(usize, usize)> {
    // Node i sits at lattice position (2 i - n) 2^cap / n, with n the step count.
    let n = spec.steps(axis) as i64;
    let p = 1i64 << cap;
    let a = lo * n + n * p;
    let b = (lo + size) * n + n * p;
    let i0 = a.div_euclid(2 * p) + i64::from(a.rem_euclid(2 * p) != 0);
    let i1 = b.div_euclid(2 * p);
    let (i0, i1) = (i0.max(0), i1.min(n));
    (i0 <= i1).then_some((i0 as usize, i1 as usize))
}

pub(crate) fn generate_in(
    spec: &FineGridSpec,
    phi: &SupportFunction,
    a: f64,
    max_level: u32,
    coordinate_system: CoordinateSystem,
) -> Result<AmrVelocityGrid> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Validation(format!("a must be positive, got {a}")));
    }
    if phi.phi.len() != spec.len() {
        return Err(Error::Structural(format!(
            "support function has {} values for {} fine nodes",
            phi.phi.len(),
            spec.len()
        )));
    }
    if max_level > 40 {
        return Err(Error::Validation(format!("refinement cap {max_level} too large")));
    }
    let dim = spec.dim();
    let root_size = 1i64 << (max_level + 1);
    let mut lattice = Lattice {
        mid: [0.0; 3],
        step: [1.0; 3],
    };
    let mut root_lo = [0; 3];
    let mut root_hi = [0; 3];
    for k in 0..dim {
        lattice.mid[k] = spec.mid(k);
        lattice.step[k] = (spec.v_max[k] - spec.v_min[k]) / root_size as f64;
        root_lo[k] = -(root_size / 2);
        root_hi[k] = root_size / 2;
    }
    let phi_max = phi.max();
    let mut grid = AmrVelocityGrid {
        coordinate_system,
        lattice,
        root_lo,
        root_hi,
        leaves: Vec::new(),
        mode: None,
        points: Vec::new(),
        weights: Vec::new(),
        symmetry_pairing: None,
    };

    let mut stack = vec![Leaf {
        lo: root_lo,
        size: root_size,
        level: 0,
    }];
    let mut leaves = Vec::new();
    while let Some(cell) = stack.pop() {
        let m = a * cell_min(spec, phi, &grid, &cell, max_level).unwrap_or(phi_max);
        let split = (0..dim).any(|k| cell.size as f64 * lattice.step[k] > m);
        if !split {
            leaves.push(cell);
            continue;
        }
        if cell.level >= max_level {
            return Err(Error::RefinementOverflow {
                max_level,
                center: grid.leaf_center(&cell)[..dim].to_vec(),
            });
        }
        let half = cell.size / 2;
        for child in 0..1usize << dim {
            let mut lo = cell.lo;
            for (k, l) in lo.iter_mut().enumerate().take(dim) {
                if child >> k & 1 == 1 {
                    *l += half;
                }
            }
            stack.push(Leaf {
                lo,
                size: half,
                level: cell.level + 1,
            });
        }
    }
    sort_leaves(&mut leaves, dim);
    grid.leaves = leaves;
    Ok(grid)
}

/// Lexicographic order of leaf centers, axis 0 first.
pub(crate) fn sort_leaves(leaves: &mut [Leaf], dim: usize) {
    leaves.sort_by_key(|l| {
        let mut key = [0i64; 3];
        for k in 0..dim {
            key[k] = 2 * l.lo[k] + l.size;
        }
        key
    });
}

/// Smallest support value over fine nodes (and the wall sample) in the closed cell.
fn cell_min(spec: &FineGridSpec, phi: &SupportFunction, grid: &AmrVelocityGrid, cell: &Leaf, cap: u32) -> Option<f64> {
    let dim = spec.dim();
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    let mut any = true;
    for k in 0..dim {
        match node_range(spec, k, cell.lo[k], cell.size, cap) {
            Some((a, b)) => {
                lo[k] = a;
                hi[k] = b;
            }
            None => any = false,
        }
    }
    let mut best: Option<f64> = None;
    if any {
        let mut idx = lo;
        'nodes: loop {
            let v = phi.phi[spec.flat_index(&idx)];
            best = Some(best.map_or(v, |b| b.min(v)));
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
    if let Some(w) = phi.wall_entry {
        let (clo, chi) = grid.leaf_bounds(cell);
        if (0..dim).all(|k| clo[k] <= 0.0 && 0.0 <= chi[k]) {
            best = Some(best.map_or(w, |b| b.min(w)));
        }
    }
    best
}

/// Unrefined grid whose leaves are the cells between neighbouring fine nodes;
/// its Q1 quadrature is the trapezoidal rule on the fine nodes.
pub fn uniform_grid(spec: &FineGridSpec, coordinate_system: CoordinateSystem) -> AmrVelocityGrid {
    let dim = spec.dim();
    let mut lattice = Lattice {
        mid: [0.0; 3],
        step: [1.0; 3],
    };
    let mut root_lo = [0; 3];
    let mut root_hi = [0; 3];
    let mut cells = [1usize; 3];
    for k in 0..dim {
        let s = spec.steps(k) as i64;
        lattice.mid[k] = spec.mid(k);
        lattice.step[k] = 0.5 * spec.dv;
        root_lo[k] = -s;
        root_hi[k] = s;
        cells[k] = s as usize;
    }
    let total: usize = cells[..dim].iter().product();
    let mut leaves = Vec::with_capacity(total);
    for n in 0..total {
        let mut r = n;
        let mut lo = [0i64; 3];
        for k in 0..dim {
            lo[k] = 2 * (r % cells[k]) as i64 + root_lo[k];
            r /= cells[k];
        }
        leaves.push(Leaf { lo, size: 2, level: 0 });
    }
    sort_leaves(&mut leaves, dim);
    AmrVelocityGrid {
        coordinate_system,
        lattice,
        root_lo,
        root_hi,
        leaves,
        mode: None,
        points: Vec::new(),
        weights: Vec::new(),
        symmetry_pairing: None,
    }
}

/// Sum in a canonical order so that mirror-image accumulations agree bitwise.
fn ordered_sum(mut parts: Vec<f64>) -> f64 {
    parts.sort_by(f64::total_cmp);
    parts.iter().sum()
}

/// Fills `points`/`weights` (and drops any stale symmetry pairing).
pub fn attach_quadrature(mut grid: AmrVelocityGrid, mode: QuadratureMode) -> AmrVelocityGrid {
    let dim = grid.tree_dim();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    // Per tree point: coordinate and (for cylindrical grids) the zeta-weighted area.
    let planar: Vec<([f64; 3], f64)> = match mode {
        QuadratureMode::P0 => grid
            .leaves
            .iter()
            .map(|l| {
                let w = match grid.coordinate_system {
                    CoordinateSystem::Cartesian { .. } => grid.leaf_volume(l),
                    CoordinateSystem::Cylindrical { .. } => {
                        let (lo, hi) = grid.leaf_bounds(l);
                        (hi[0] - lo[0]) * 0.5 * (hi[1] * hi[1] - lo[1] * lo[1])
                    }
                };
                (grid.leaf_center(l), w)
            })
            .collect(),
        QuadratureMode::Q1 => {
            let mut contrib: BTreeMap<[i64; 3], Vec<f64>> = BTreeMap::new();
            let corners = 1usize << dim;
            for l in &grid.leaves {
                let (lo, hi) = grid.leaf_bounds(l);
                for corner in 0..corners {
                    let mut key = [0i64; 3];
                    for k in 0..dim {
                        key[k] = l.lo[k] + if corner >> k & 1 == 1 { l.size } else { 0 };
                    }
                    let w = match grid.coordinate_system {
                        CoordinateSystem::Cartesian { .. } => grid.leaf_volume(l) / corners as f64,
                        CoordinateSystem::Cylindrical { .. } => {
                            // Exact integral of the bilinear hat times zeta.
                            let dz = hi[1] - lo[1];
                            let zeta_part = if corner >> 1 & 1 == 1 {
                                dz * (lo[1] + 2.0 * hi[1]) / 6.0
                            } else {
                                dz * (2.0 * lo[1] + hi[1]) / 6.0
                            };
                            0.5 * (hi[0] - lo[0]) * zeta_part
                        }
                    };
                    contrib.entry(key).or_default().push(w);
                }
            }
            // BTreeMap keys sort with axis 0 most significant, matching the leaf order.
            contrib
                .into_iter()
                .map(|(key, parts)| {
                    let mut v = [0.0; 3];
                    for (k, x) in v.iter_mut().enumerate().take(dim) {
                        *x = grid.lattice.coord(k, key[k]);
                    }
                    (v, ordered_sum(parts))
                })
                .collect()
        }
    };
    match grid.coordinate_system {
        CoordinateSystem::Cartesian { .. } => {
            for (p, w) in planar {
                points.push(p);
                weights.push(w);
            }
        }
        CoordinateSystem::Cylindrical { n_omega } => {
            let d_omega = PI / n_omega as f64;
            let omegas: Vec<(f64, f64)> = match mode {
                QuadratureMode::P0 => (0..n_omega).map(|k| ((k as f64 + 0.5) * d_omega, d_omega)).collect(),
                QuadratureMode::Q1 => (0..=n_omega)
                    .map(|k| {
                        let w = if k == 0 || k == n_omega { 0.5 * d_omega } else { d_omega };
                        (k as f64 * d_omega, w)
                    })
                    .collect(),
            };
            for &(omega, wo) in &omegas {
                for &(p, w) in &planar {
                    points.push([p[0], p[1], omega]);
                    weights.push(w * wo);
                }
            }
        }
    }
    grid.points = points;
    grid.weights = weights;
    grid.mode = Some(mode);
    grid.symmetry_pairing = None;
    grid
}
