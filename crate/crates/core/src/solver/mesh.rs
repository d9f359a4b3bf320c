//! Structured 2D space meshes.
//!
//! Nodes are indexed `(i, j)` with `i` fastest; cell `(i, j)` is the
//! quadrilateral with corners `(i, j), (i+1, j), (i+1, j+1), (i, j+1)`. The
//! line solver inverts along `i`, so generators put `i` in the wall-normal
//! direction.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference used to measure wall angles: `theta = 0` along `stagnation_dir`
/// from `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFrame {
    pub center: [f64; 2],
    pub stagnation_dir: [f64; 2],
}

impl Default for BodyFrame {
    fn default() -> Self {
        BodyFrame {
            center: [0.0, 0.0],
            stagnation_dir: [-1.0, 0.0],
        }
    }
}

impl BodyFrame {
    /// Angle in degrees between `x - center` and the stagnation direction.
    pub fn theta_deg(&self, x: [f64; 2]) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let s = self.stagnation_dir;
        let cross = s[0] * d[1] - s[1] * d[0];
        let dot = s[0] * d[0] + s[1] * d[1];
        cross.abs().atan2(dot).to_degrees()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceMesh2D {
    pub ni: usize,
    pub nj: usize,
    /// `(ni + 1) (nj + 1)` node coordinates, i fastest.
    pub nodes: Vec<[f64; 2]>,
    /// Cell areas, index `j * ni + i`.
    pub volume: Vec<f64>,
    pub centroid: Vec<[f64; 2]>,
    /// Length-scaled normals of i-faces, index `j * (ni + 1) + i`; face `i`
    /// separates cells `i - 1` and `i` and its normal points toward increasing `i`.
    pub normal_i: Vec<[f64; 2]>,
    /// Length-scaled normals of j-faces, index `j * ni + i`, pointing toward increasing `j`.
    pub normal_j: Vec<[f64; 2]>,
    pub body: BodyFrame,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl SpaceMesh2D {
    pub fn from_nodes(ni: usize, nj: usize, nodes: Vec<[f64; 2]>, body: BodyFrame) -> Result<Self> {
        if ni < 2 || nj < 2 {
            return Err(Error::Structural(format!(
                "mesh needs at least 2x2 cells, got {ni}x{nj}"
            )));
        }
        if nodes.len() != (ni + 1) * (nj + 1) {
            return Err(Error::Structural(format!(
                "{} nodes for a {ni}x{nj}-cell mesh (expected {})",
                nodes.len(),
                (ni + 1) * (nj + 1)
            )));
        }
        if nodes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Structural("non-finite node coordinate".into()));
        }
        let node = |i: usize, j: usize| nodes[j * (ni + 1) + i];
        let mut volume = Vec::with_capacity(ni * nj);
        let mut centroid = Vec::with_capacity(ni * nj);
        let mut orientation = 0.0f64;
        for j in 0..nj {
            for i in 0..ni {
                let p = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
                let mut a2 = 0.0;
                let mut cx = 0.0;
                let mut cy = 0.0;
                for k in 0..4 {
                    let (p0, p1) = (p[k], p[(k + 1) % 4]);
                    let c = cross(p0, p1);
                    a2 += c;
                    cx += (p0[0] + p1[0]) * c;
                    cy += (p0[1] + p1[1]) * c;
                }
                if a2 == 0.0 || (orientation != 0.0 && a2.signum() != orientation) {
                    return Err(Error::Structural(format!("degenerate or folded cell ({i}, {j})")));
                }
                orientation = a2.signum();
                volume.push(0.5 * a2.abs());
                centroid.push([cx / (3.0 * a2), cy / (3.0 * a2)]);
            }
        }
        // For a right-handed mesh (i along x, j along y) the +i normal of an
        // edge with tangent t is (t_y, -t_x).
        let s = orientation;
        let mut normal_i = Vec::with_capacity((ni + 1) * nj);
        for j in 0..nj {
            for i in 0..=ni {
                let (a, b) = (node(i, j), node(i, j + 1));
                normal_i.push([s * (b[1] - a[1]), -s * (b[0] - a[0])]);
            }
        }
        let mut normal_j = Vec::with_capacity(ni * (nj + 1));
        for j in 0..=nj {
            for i in 0..ni {
                let (a, b) = (node(i, j), node(i + 1, j));
                normal_j.push([-s * (b[1] - a[1]), s * (b[0] - a[0])]);
            }
        }
        Ok(SpaceMesh2D {
            ni,
            nj,
            nodes,
            volume,
            centroid,
            normal_i,
            normal_j,
            body,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.ni * self.nj
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.ni + i
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        self.nodes[j * (self.ni + 1) + i]
    }

    #[inline]
    pub fn ni_face(&self, i: usize, j: usize) -> [f64; 2] {
        self.normal_i[j * (self.ni + 1) + i]
    }

    #[inline]
    pub fn nj_face(&self, i: usize, j: usize) -> [f64; 2] {
        self.normal_j[j * self.ni + i]
    }

    /// Outward normals of cell `(i, j)`: `[-i, +i, -j, +j]`.
    #[inline]
    pub fn outward_normals(&self, i: usize, j: usize) -> [[f64; 2]; 4] {
        let a = self.ni_face(i, j);
        let b = self.ni_face(i + 1, j);
        let c = self.nj_face(i, j);
        let d = self.nj_face(i, j + 1);
        [[-a[0], -a[1]], b, [-c[0], -c[1]], d]
    }

    /// Largest `|sum of outward normals|` relative to the cell perimeter.
    pub fn closure_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.nj {
            for i in 0..self.ni {
                let n = self.outward_normals(i, j);
                let sx: f64 = n.iter().map(|v| v[0]).sum();
                let sy: f64 = n.iter().map(|v| v[1]).sum();
                let per: f64 = n.iter().map(|v| v[0].hypot(v[1])).sum();
                worst = worst.max(sx.hypot(sy) / per);
            }
        }
        worst
    }

    /// Swaps the roles of `i` and `j`.
    pub fn transposed(&self) -> Result<Self> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for i in 0..=self.ni {
            for j in 0..=self.nj {
                nodes.push(self.node(i, j));
            }
        }
        SpaceMesh2D::from_nodes(self.nj, self.ni, nodes, self.body)
    }

    /// Polar sector around a circular body of radius `r_inner`, centered at the
    /// origin with the flow coming from `-x`. `i` runs outward from the wall
    /// (geometric stretching so that the first cell has height `first_cell`,
    /// when given); `j` runs from the stagnation line (`theta = 0`) to
    /// `theta = sector_deg`.
    pub fn annulus_sector(
        r_inner: f64,
        r_outer: f64,
        ni: usize,
        nj: usize,
        first_cell: Option<f64>,
        sector_deg: f64,
    ) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner) {
            return Err(Error::Validation(format!(
                "annulus radii must satisfy 0 < r_inner < r_outer (got {r_inner}, {r_outer})"
            )));
        }
        if !(sector_deg > 0.0 && sector_deg <= 360.0) {
            return Err(Error::Validation(format!("sector angle {sector_deg} out of range")));
        }
        let radii = stretched(r_inner, r_outer, ni, first_cell)?;
        let mut nodes = Vec::with_capacity((ni + 1) * (nj + 1));
        for j in 0..=nj {
            let th = (sector_deg * j as f64 / nj as f64).to_radians();
            for &r in &radii {
                nodes.push([-r * th.cos(), r * th.sin()]);
            }
        }
        SpaceMesh2D::from_nodes(ni, nj, nodes, BodyFrame::default())
    }

    /// Rectangle `[0, length] x [y0, y1]`; `i` runs along `y`, `j` along `x`.
    /// Node ordinates are `y_mid + (2 i - ni) h / 2`, so a box centered on
    /// `y = 0` is exactly mirror symmetric.
    pub fn channel(length: f64, y0: f64, y1: f64, ni: usize, nj: usize) -> Result<Self> {
        if !(length > 0.0 && y1 > y0) {
            return Err(Error::Validation("channel needs positive extents".into()));
        }
        let hy = (y1 - y0) / ni as f64;
        let ymid = 0.5 * (y0 + y1);
        let mut nodes = Vec::with_capacity((ni + 1) * (nj + 1));
        for j in 0..=nj {
            let x = length * j as f64 / nj as f64;
            for i in 0..=ni {
                nodes.push([x, ymid + (2 * i as i64 - ni as i64) as f64 * (0.5 * hy)]);
            }
        }
        SpaceMesh2D::from_nodes(
            ni,
            nj,
            nodes,
            BodyFrame {
                center: [0.0, ymid],
                stagnation_dir: [-1.0, 0.0],
            },
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut dims = None;
        let mut body = BodyFrame::default();
        let mut nodes = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let nums = |s: &[&str]| -> Result<Vec<f64>> {
                s.iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|e| perr(ln + 1, format!("bad number `{t}`: {e}")))
                    })
                    .collect()
            };
            match toks[0] {
                "nodes" if dims.is_none() => {
                    if toks.len() != 3 {
                        return Err(perr(ln + 1, "expected `nodes NI NJ`".into()));
                    }
                    let n: Vec<usize> = toks[1..]
                        .iter()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|e| perr(ln + 1, format!("bad count `{t}`: {e}")))
                        })
                        .collect::<Result<_>>()?;
                    dims = Some((n[0], n[1]));
                }
                "body" => {
                    let v = nums(&toks[1..])?;
                    if v.len() != 4 {
                        return Err(perr(ln + 1, "expected `body cx cy sx sy`".into()));
                    }
                    body = BodyFrame {
                        center: [v[0], v[1]],
                        stagnation_dir: [v[2], v[3]],
                    };
                }
                _ => {
                    if dims.is_none() {
                        return Err(perr(ln + 1, "missing `nodes NI NJ` header".into()));
                    }
                    let v = nums(&toks)?;
                    if v.len() != 2 {
                        return Err(perr(ln + 1, format!("expected `x y`, got {} values", v.len())));
                    }
                    nodes.push([v[0], v[1]]);
                }
            }
        }
        let (n1, n2) = dims.ok_or_else(|| perr(0, "missing `nodes NI NJ` header".into()))?;
        if n1 < 2 || n2 < 2 {
            return Err(perr(0, "node counts must be at least 2".into()));
        }
        SpaceMesh2D::from_nodes(n1 - 1, n2 - 1, nodes, body)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let b = self.body;
        let _ = writeln!(
            s,
            "body {:.17e} {:.17e} {:.17e} {:.17e}",
            b.center[0], b.center[1], b.stagnation_dir[0], b.stagnation_dir[1]
        );
        let _ = writeln!(s, "nodes {} {}", self.ni + 1, self.nj + 1);
        for p in &self.nodes {
            let _ = writeln!(s, "{:.17e} {:.17e}", p[0], p[1]);
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// `n + 1` radii from `r0` to `r1`, geometric with first spacing `first` when given.
fn stretched(r0: f64, r1: f64, n: usize, first: Option<f64>) -> Result<Vec<f64>> {
    let len = r1 - r0;
    let ratio = match first {
        None => 1.0,
        Some(h) if !(h > 0.0 && h < len) => {
            return Err(Error::Validation(format!("first cell {h} must lie in (0, {len})")))
        }
        Some(h) if h * n as f64 >= len => 1.0,
        Some(h) => {
            // Solve h (g^n - 1) / (g - 1) = len for g > 1.
            let total = |g: f64| h * (g.powi(n as i32) - 1.0) / (g - 1.0);
            let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
            while total(hi) < len {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if total(mid) < len {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    };
    let mut r = Vec::with_capacity(n + 1);
    if ratio == 1.0 {
        for k in 0..=n {
            r.push(r0 + len * k as f64 / n as f64);
        }
    } else {
        let h = first.unwrap_or(len / n as f64);
        let mut x = r0;
        let mut dh = h;
        for _ in 0..n {
            r.push(x);
            x += dh;
            dh *= ratio;
        }
        r.push(r1);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_is_closed_and_positive() {
        let m = SpaceMesh2D::annulus_sector(0.1, 0.3, 12, 10, Some(1e-3), 90.0).unwrap();
        assert!(m.volume.iter().all(|&v| v > 0.0));
        assert!(m.closure_defect() < 1e-12);
        let area: f64 = m.volume.iter().sum();
        // Ten straight-sided sectors of a quarter annulus.
        let exact = 5.0 * (std::f64::consts::PI / 20.0).sin() * (0.09 - 0.01);
        assert!((area - exact).abs() < 1e-12 * exact);
        let r1 = m.node(1, 0)[0].abs();
        assert!((r1 - 0.101).abs() < 1e-12);
        // +i normals point away from the body.
        let n = m.ni_face(0, 0);
        let c = m.centroid[m.cell(0, 0)];
        assert!(n[0] * c[0] + n[1] * c[1] > 0.0);
    }

    #[test]
    fn channel_is_mirror_symmetric() {
        let m = SpaceMesh2D::channel(1.0, -0.5, 0.5, 6, 4).unwrap();
        for j in 0..=4 {
            for i in 0..=6 {
                assert_eq!(m.node(i, j)[1], -m.node(6 - i, j)[1]);
            }
        }
        assert!(m.closure_defect() < 1e-14);
        assert!(m.volume.iter().all(|&v| (v - 1.0 / 24.0).abs() < 1e-15));
    }

    #[test]
    fn theta_from_stagnation() {
        let b = BodyFrame::default();
        assert!((b.theta_deg([-1.0, 0.0])).abs() < 1e-12);
        assert!((b.theta_deg([0.0, 1.0]) - 90.0).abs() < 1e-12);
        assert!((b.theta_deg([0.0, -1.0]) - 90.0).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip_and_transpose() {
        let m = SpaceMesh2D::annulus_sector(1.0, 2.0, 3, 4, None, 60.0).unwrap();
        let back = SpaceMesh2D::parse(&m.to_text(), Path::new("m")).unwrap();
        assert_eq!(m, back);
        let t = m.transposed().unwrap();
        assert_eq!((t.ni, t.nj), (4, 3));
        assert!((t.volume.iter().sum::<f64>() - m.volume.iter().sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn folded_mesh_is_rejected() {
        let nodes = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [2.0, 0.0],
            [0.0, 1.0],
            [3.0, 1.0],
            [2.0, 1.0],
            [0.0, 2.0],
            [1.0, 2.0],
            [2.0, 2.0],
        ];
        assert!(SpaceMesh2D::from_nodes(2, 2, nodes, BodyFrame::default()).is_err());
    }
}
