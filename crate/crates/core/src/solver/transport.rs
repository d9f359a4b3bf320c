//! Upwind finite-volume transport with a three-argument minmod correction.

use rayon::prelude::*;

use crate::quadrature::Quadrature;
use crate::solver::{DistributionField, SpaceMesh2D};

/// Spatial order of the explicit transport term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransportOrder {
    First,
    /// Second order; the correction is `factor |a| minmod(..)` (1 for the
    /// plain form, 0.5 for the halved variant).
    Second {
        factor: f64,
    },
}

impl TransportOrder {
    fn factor(self) -> f64 {
        match self {
            TransportOrder::First => 0.0,
            TransportOrder::Second { factor } => factor,
        }
    }
}

/// Zero when the signs differ, otherwise the argument of smallest magnitude.
#[inline]
pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Numerical flux for normal velocity `a` through a face with states
/// `ll, l | r, rr` (the normal points from `l` to `r`).
#[inline]
pub fn face_flux(a: f64, ll: f64, l: f64, r: f64, rr: f64, lim: f64) -> f64 {
    let base = if a > 0.0 { a * l } else { a * r };
    if lim == 0.0 {
        base
    } else {
        base + lim * a.abs() * minmod3(l - ll, r - l, rr - r)
    }
}

/// Per-face flux of one velocity point into `out` for both arrays.
#[inline]
#[allow(clippy::too_many_arguments)]
fn flux_pair(
    field: &DistributionField,
    quad: &Quadrature,
    nrm: [f64; 2],
    cells: [(isize, isize); 4],
    lim: f64,
    out_f: &mut [f64],
    out_g: &mut [f64],
) {
    let o: [usize; 4] = cells.map(|(i, j)| field.offset(i, j));
    for q in 0..quad.len() {
        let v = &quad.points[q];
        let a = v[0] * nrm[0] + v[1] * nrm[1];
        let ff = &field.f;
        let gg = &field.g;
        out_f[q] = face_flux(a, ff[o[0] + q], ff[o[1] + q], ff[o[2] + q], ff[o[3] + q], lim);
        out_g[q] = face_flux(a, gg[o[0] + q], gg[o[1] + q], gg[o[2] + q], gg[o[3] + q], lim);
    }
}

/// `(1/|Omega|) sum of outward face fluxes` per interior cell and velocity
/// point, cell-major (`(j ni + i) nq + q`). Ghost layers must be filled.
/// Every face flux is evaluated once and added to one cell and subtracted
/// from the other.
pub fn transport_divergence(
    field: &DistributionField,
    mesh: &SpaceMesh2D,
    quad: &Quadrature,
    order: TransportOrder,
    div_f: &mut [f64],
    div_g: &mut [f64],
) {
    let (ni, nj, nq) = (mesh.ni, mesh.nj, quad.len());
    let lim = order.factor();
    debug_assert_eq!(div_f.len(), ni * nj * nq);

    // j-faces: row jf separates cell rows jf - 1 and jf.
    let mut jf_f = vec![0.0; ni * (nj + 1) * nq];
    let mut jf_g = vec![0.0; ni * (nj + 1) * nq];
    jf_f.par_chunks_mut(ni * nq)
        .zip(jf_g.par_chunks_mut(ni * nq))
        .enumerate()
        .for_each(|(jf, (rf, rg))| {
            let j = jf as isize;
            for i in 0..ni {
                let ii = i as isize;
                let cells = [(ii, j - 2), (ii, j - 1), (ii, j), (ii, j + 1)];
                let s = i * nq..(i + 1) * nq;
                flux_pair(
                    field,
                    quad,
                    mesh.nj_face(i, jf),
                    cells,
                    lim,
                    &mut rf[s.clone()],
                    &mut rg[s],
                );
            }
        });

    div_f
        .par_chunks_mut(ni * nq)
        .zip(div_g.par_chunks_mut(ni * nq))
        .enumerate()
        .for_each(|(j, (row_f, row_g))| {
            let jj = j as isize;
            let mut pf = vec![0.0; nq];
            let mut pg = vec![0.0; nq];
            let mut cf = vec![0.0; nq];
            let mut cg = vec![0.0; nq];
            // Flux through the i-face left of cell 0.
            flux_pair(
                field,
                quad,
                mesh.ni_face(0, j),
                [(-2, jj), (-1, jj), (0, jj), (1, jj)],
                lim,
                &mut pf,
                &mut pg,
            );
            for i in 0..ni {
                let ii = i as isize;
                let cells = [(ii - 1, jj), (ii, jj), (ii + 1, jj), (ii + 2, jj)];
                flux_pair(field, quad, mesh.ni_face(i + 1, j), cells, lim, &mut cf, &mut cg);
                let lo = (j * ni + i) * nq;
                let hi = ((j + 1) * ni + i) * nq;
                let inv = 1.0 / mesh.volume[j * ni + i];
                let s = i * nq;
                for q in 0..nq {
                    row_f[s + q] = (cf[q] - pf[q] + jf_f[hi + q] - jf_f[lo + q]) * inv;
                    row_g[s + q] = (cg[q] - pg[q] + jf_g[hi + q] - jf_g[lo + q]) * inv;
                }
                std::mem::swap(&mut pf, &mut cf);
                std::mem::swap(&mut pg, &mut cg);
            }
        });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod3(1.0, 2.0, -1.0), 0.0);
        assert_eq!(minmod3(1.0, 2.0, 3.0), 1.0);
        assert_eq!(minmod3(-2.0, -1.0, -3.0), -1.0);
        assert_eq!(minmod3(0.0, 1.0, 1.0), 0.0);
    }

    fn one_point(v: [f64; 2]) -> Quadrature {
        Quadrature::new(2, vec![[v[0], v[1], 0.0]], vec![1.0]).unwrap()
    }

    #[test]
    fn constant_field_has_zero_divergence() {
        let mesh = SpaceMesh2D::annulus_sector(1.0, 3.0, 5, 4, Some(0.1), 90.0).unwrap();
        let quad = Quadrature::new(2, vec![[1.3, -0.4, 0.0], [-2.0, 0.7, 0.0]], vec![0.5, 0.5]).unwrap();
        let mut field = DistributionField::zeros(5, 4, 2);
        field.f.iter_mut().for_each(|x| *x = 2.5);
        field.g.iter_mut().for_each(|x| *x = 0.5);
        let mut df = vec![1.0; 5 * 4 * 2];
        let mut dg = df.clone();
        transport_divergence(
            &field,
            &mesh,
            &quad,
            TransportOrder::Second { factor: 1.0 },
            &mut df,
            &mut dg,
        );
        let scale = 2.5 * 2.0 * 30.0;
        assert!(df.iter().all(|x| x.abs() < 1e-12 * scale), "{df:?}");
    }

    #[test]
    fn linear_profile_second_order() {
        // Six cells along i of width h, f = c x at centers.
        let (h, c, v) = (0.2, 3.0, 1.7);
        let mesh = SpaceMesh2D::channel(6.0 * h, 0.0, 1.0, 2, 6)
            .unwrap()
            .transposed()
            .unwrap();
        let quad = one_point([v, 0.0]);
        let mut field = DistributionField::zeros(mesh.ni, mesh.nj, 1);
        for j in -2..(mesh.nj as isize + 2) {
            for i in -2..(mesh.ni as isize + 2) {
                let x = (i as f64 + 0.5) * h;
                field.f_at_mut(i, j)[0] = c * x;
            }
        }
        let n = mesh.ni * mesh.nj;
        let mut df = vec![0.0; n];
        let mut dg = vec![0.0; n];
        assert!((mesh.node(1, 0)[0] - h).abs() < 1e-15);
        transport_divergence(
            &field,
            &mesh,
            &quad,
            TransportOrder::Second { factor: 1.0 },
            &mut df,
            &mut dg,
        );
        for (k, d) in df.iter().enumerate() {
            assert!((d - v * c).abs() < 1e-12, "cell {k}: {d}");
        }
    }

    #[test]
    fn fluxes_telescope() {
        let mesh = SpaceMesh2D::annulus_sector(1.0, 2.0, 4, 6, None, 60.0).unwrap();
        let quad = Quadrature::new(2, vec![[0.3, 1.1, 0.0], [-0.8, -0.2, 0.0]], vec![1.0, 2.0]).unwrap();
        let mut field = DistributionField::zeros(4, 6, 2);
        let mut s = 1u64;
        for x in field.f.iter_mut().chain(field.g.iter_mut()) {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *x = (s >> 11) as f64 / (1u64 << 53) as f64;
        }
        // The volume-weighted total equals the net first-order boundary flux.
        let mut df = vec![0.0; 4 * 6 * 2];
        let mut dg = df.clone();
        transport_divergence(&field, &mesh, &quad, TransportOrder::First, &mut df, &mut dg);
        for q in 0..2 {
            let total: f64 = (0..24).map(|c| df[c * 2 + q] * mesh.volume[c]).sum();
            let mut boundary = 0.0;
            let v = quad.points[q];
            for j in 0..6 {
                for (i, sgn) in [(0usize, -1.0), (4, 1.0)] {
                    let n = mesh.ni_face(i, j);
                    let a = sgn * (v[0] * n[0] + v[1] * n[1]);
                    let inside = field.f_at(if i == 0 { 0 } else { 3 }, j as isize)[q];
                    let outside = field.f_at(if i == 0 { -1 } else { 4 }, j as isize)[q];
                    boundary += if a > 0.0 { a * inside } else { a * outside };
                }
            }
            for i in 0..4 {
                for (j, sgn) in [(0usize, -1.0), (6, 1.0)] {
                    let n = mesh.nj_face(i, j);
                    let a = sgn * (v[0] * n[0] + v[1] * n[1]);
                    let inside = field.f_at(i as isize, if j == 0 { 0 } else { 5 })[q];
                    let outside = field.f_at(i as isize, if j == 0 { -1 } else { 6 })[q];
                    boundary += if a > 0.0 { a * inside } else { a * outside };
                }
            }
            assert!(
                (total - boundary).abs() < 1e-12 * boundary.abs().max(1.0),
                "{total} vs {boundary}"
            );
        }
    }
}
