//! Macroscopic fields on a structured space mesh and their text file format.
//!
//! ```text
//! # comment
//! dims i_max j_max [k_max]
//! x y [z] rho u_x u_y [u_z|u_r] T      (one line per cell, i fastest)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kinetic::PrimitiveState;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldExtrema {
    pub rho: (f64, f64),
    pub u: Vec<(f64, f64)>,
    pub t: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacroField {
    /// Cell counts per space direction.
    pub dims: Vec<usize>,
    pub cells: Vec<PrimitiveState>,
    /// Optional cell centroids, m.
    pub centroids: Option<Vec<[f64; 3]>>,
    /// Number of velocity components carried by the cells.
    pub vel_dim: usize,
}

impl MacroField {
    pub fn new(
        dims: Vec<usize>,
        cells: Vec<PrimitiveState>,
        centroids: Option<Vec<[f64; 3]>>,
        vel_dim: usize,
    ) -> Result<Self> {
        let count: usize = dims.iter().product();
        if dims.is_empty() || count == 0 {
            return Err(Error::Structural("macro field has no cells".into()));
        }
        if count != cells.len() {
            return Err(Error::Structural(format!(
                "dims {dims:?} describe {count} cells but {} were given",
                cells.len()
            )));
        }
        if let Some(c) = &centroids {
            if c.len() != cells.len() {
                return Err(Error::Structural("centroid count differs from cell count".into()));
            }
        }
        if !(1..=3).contains(&vel_dim) {
            return Err(Error::Structural(format!("velocity dimension {vel_dim} unsupported")));
        }
        let field = MacroField {
            dims,
            cells,
            centroids,
            vel_dim,
        };
        for (n, c) in field.cells.iter().enumerate() {
            c.validate().map_err(|e| {
                let idx = field.multi_index(n);
                Error::Validation(format!("cell {idx:?}: {e}"))
            })?;
        }
        Ok(field)
    }

    /// A field given as a flat list of states (no mesh structure).
    pub fn from_states(cells: Vec<PrimitiveState>, vel_dim: usize) -> Result<Self> {
        let n = cells.len();
        MacroField::new(vec![n], cells, None, vel_dim)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(i, j, k)` of flat index `n` (i fastest).
    pub fn multi_index(&self, n: usize) -> Vec<usize> {
        let mut r = n;
        self.dims
            .iter()
            .map(|&d| {
                let i = r % d;
                r /= d;
                i
            })
            .collect()
    }

    /// `sqrt(R T)` per cell.
    /// `(min, max)` of density, each velocity component and temperature.
    pub fn extrema(&self) -> FieldExtrema {
        let span = |get: &dyn Fn(&PrimitiveState) -> f64| {
            self.cells
                .iter()
                .map(get)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
        };
        FieldExtrema {
            rho: span(&|c| c.rho),
            u: (0..self.vel_dim).map(|k| span(&|c| c.u[k])).collect(),
            t: span(&|c| c.t),
        }
    }

    pub fn thermal_speeds(&self, r: f64) -> Vec<f64> {
        self.cells.iter().map(|c| (r * c.t).sqrt()).collect()
    }

    /// The field plus its reflection `u_axis -> -u_axis` (and `x_axis -> -x_axis`).
    pub fn mirrored(&self, axis: usize) -> MacroField {
        let mut cells = self.cells.clone();
        cells.extend(self.cells.iter().map(|c| {
            let mut m = *c;
            m.u[axis] = -m.u[axis];
            m
        }));
        let centroids = self.centroids.as_ref().map(|cs| {
            let mut all = cs.clone();
            all.extend(cs.iter().map(|p| {
                let mut m = *p;
                m[axis] = -m[axis];
                m
            }));
            all
        });
        MacroField {
            dims: vec![cells.len()],
            cells,
            centroids,
            vel_dim: self.vel_dim,
        }
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
        let mut dims: Option<Vec<usize>> = None;
        let mut cells = Vec::new();
        let mut centroids = Vec::new();
        let mut vel_dim = None;
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if dims.is_none() {
                if tokens.next() != Some("dims") {
                    return Err(perr(line_no, "expected header `dims i_max j_max [k_max]`".into()));
                }
                let d = tokens
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|e| perr(line_no, format!("bad dimension `{t}`: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if !(2..=3).contains(&d.len()) || d.contains(&0) {
                    return Err(perr(line_no, format!("expected 2 or 3 positive dimensions, got {d:?}")));
                }
                dims = Some(d);
                continue;
            }
            let nd = dims.as_ref().map_or(0, Vec::len);
            let vals = tokens
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| perr(line_no, format!("bad number `{t}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let vd = match (nd, vals.len()) {
                (2, 6) => 2,
                (2, 7) | (3, 8) => 3,
                (_, n) => {
                    return Err(perr(
                        line_no,
                        format!("{n} columns do not match a {nd}-d field (x y [z] rho u.. T)"),
                    ))
                }
            };
            if *vel_dim.get_or_insert(vd) != vd {
                return Err(perr(line_no, "inconsistent column count".into()));
            }
            let mut x = [0.0; 3];
            x[..nd].copy_from_slice(&vals[..nd]);
            let rho = vals[nd];
            let mut u = [0.0; 3];
            u[..vd].copy_from_slice(&vals[nd + 1..nd + 1 + vd]);
            let t = vals[nd + 1 + vd];
            let idx = cells.len();
            let state = PrimitiveState::new(rho, u, t);
            if let Err(e) = state.validate() {
                let d = dims.as_ref().unwrap();
                let (i, j) = (idx % d[0], (idx / d[0]) % d[1]);
                return Err(Error::Validation(format!(
                    "{}:{line_no}: cell ({i},{j}): {e}",
                    path.display()
                )));
            }
            cells.push(state);
            centroids.push(x);
        }
        let dims = dims.ok_or_else(|| perr(0, "missing `dims` header".into()))?;
        MacroField::new(dims, cells, Some(centroids), vel_dim.unwrap_or(2)).map_err(|e| perr(0, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let nd = self.dims.len().clamp(2, 3);
        let mut s = String::new();
        let _ = write!(s, "dims");
        for d in &self.dims {
            let _ = write!(s, " {d}");
        }
        if self.dims.len() == 1 {
            let _ = write!(s, " 1");
        }
        s.push('\n');
        for (n, c) in self.cells.iter().enumerate() {
            let x = self.centroids.as_ref().map_or([0.0; 3], |cs| cs[n]);
            for xk in &x[..nd] {
                let _ = write!(s, "{xk:.17e} ");
            }
            let _ = write!(s, "{:.17e}", c.rho);
            for uk in &c.u[..self.vel_dim] {
                let _ = write!(s, " {uk:.17e}");
            }
            let _ = writeln!(s, " {:.17e}", c.t);
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_cell() {
        let f = MacroField::parse("# one cell\ndims 1 1\n0 0 1.0 10 -5 300\n", Path::new("x")).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.cells[0].u, [10.0, -5.0, 0.0]);
        assert_eq!(f.vel_dim, 2);
        let e = f.extrema();
        assert_eq!((e.rho, e.t), ((1.0, 1.0), (300.0, 300.0)));
        assert_eq!(e.u, vec![(10.0, 10.0), (-5.0, -5.0)]);
    }

    #[test]
    fn negative_temperature_names_the_cell() {
        let err = MacroField::parse("dims 1 1\n0 0 1.0 0 0 -5\n", Path::new("f.dat")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("cell (0,0)"), "{err}");
    }

    #[test]
    fn malformed_number_reports_line() {
        let err = MacroField::parse("dims 2 1\n0 0 1 0 0 300\n0 0 1 zz 0 300\n", Path::new("f.dat")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let cells = vec![
            PrimitiveState::new(1.5, [1.0, 2.0, 0.0], 300.0),
            PrimitiveState::new(0.1, [-3.0, 0.25, 0.0], 1234.5),
        ];
        let f = MacroField::new(vec![2, 1], cells, Some(vec![[0.1, 0.2, 0.0], [0.3, 0.4, 0.0]]), 2).unwrap();
        let g = MacroField::parse(&f.to_text(), Path::new("t")).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn count_mismatch_is_structural() {
        let cells = vec![PrimitiveState::new(1.0, [0.0; 3], 1.0)];
        assert!(matches!(
            MacroField::new(vec![2, 1], cells, None, 2),
            Err(Error::Structural(_))
        ));
    }
}
