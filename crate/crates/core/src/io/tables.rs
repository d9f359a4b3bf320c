//! CSV tables: wall heat flux and residual history.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{ResidualRecord, WallFluxSample};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxRow {
    pub theta_deg: f64,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "q_n_W_per_m2")]
    pub q_n: f64,
}

impl From<&WallFluxSample> for FluxRow {
    fn from(s: &WallFluxSample) -> Self {
        FluxRow {
            theta_deg: s.theta_deg,
            x: s.x,
            y: s.y,
            q_n: s.q_n,
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: format!("{kind:?}"),
        },
    }
}

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| csv_error(path, e))?;
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "no data rows".into(),
        });
    }
    Ok(rows)
}

pub fn write_flux_csv(samples: &[WallFluxSample], path: impl AsRef<Path>) -> Result<()> {
    write_rows(samples.iter().map(FluxRow::from), path.as_ref())
}

pub fn read_flux_csv(path: impl AsRef<Path>) -> Result<Vec<FluxRow>> {
    let path = path.as_ref();
    let rows: Vec<FluxRow> = read_rows(path)?;
    if let Some(k) = rows
        .iter()
        .position(|r| !(r.theta_deg.is_finite() && r.q_n.is_finite()))
    {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: k + 2,
            msg: "non-finite value".into(),
        });
    }
    Ok(rows)
}

pub fn write_residual_csv(history: &[ResidualRecord], path: impl AsRef<Path>) -> Result<()> {
    write_rows(history, path.as_ref())
}

pub fn read_residual_csv(path: impl AsRef<Path>) -> Result<Vec<ResidualRecord>> {
    read_rows(path.as_ref())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxComparison {
    /// Largest `|b - a| / |a|` over the compared angles.
    pub max_rel: f64,
    /// `||b - a||_2 / ||a||_2`.
    pub l2_rel: f64,
    pub samples: usize,
}

/// Linear interpolation of `(theta, q)` data sorted by angle; `None` outside.
fn interpolate(sorted: &[(f64, f64)], theta: f64) -> Option<f64> {
    let (first, last) = (sorted.first()?, sorted.last()?);
    if theta < first.0 || theta > last.0 {
        return None;
    }
    let k = sorted.partition_point(|p| p.0 < theta);
    if k < sorted.len() && sorted[k].0 == theta {
        return Some(sorted[k].1);
    }
    let (a, b) = (sorted[k - 1], sorted[k]);
    Some(a.1 + (b.1 - a.1) * (theta - a.0) / (b.0 - a.0))
}

/// Compares `b` against the reference `a`. When the angles differ, `b` is
/// interpolated linearly in `theta` at the reference angles inside its range.
pub fn compare_flux(a: &[FluxRow], b: &[FluxRow]) -> Result<FluxComparison> {
    let same = a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.theta_deg == q.theta_deg);
    let pairs: Vec<(f64, f64)> = if same {
        a.iter().zip(b).map(|(p, q)| (p.q_n, q.q_n)).collect()
    } else {
        let mut sb: Vec<(f64, f64)> = b.iter().map(|r| (r.theta_deg, r.q_n)).collect();
        sb.sort_by(|x, y| x.0.total_cmp(&y.0));
        sb.dedup_by(|x, y| x.0 == y.0);
        a.iter()
            .filter_map(|r| interpolate(&sb, r.theta_deg).map(|q| (r.q_n, q)))
            .collect()
    };
    if pairs.is_empty() {
        return Err(Error::Validation("the two flux profiles share no angles".into()));
    }
    let mut max_rel = 0.0f64;
    let (mut num, mut den) = (0.0, 0.0);
    for &(qa, qb) in &pairs {
        let d = (qb - qa).abs();
        max_rel = max_rel.max(if qa == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / qa.abs()
        });
        num += d * d;
        den += qa * qa;
    }
    let l2_rel = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(FluxComparison {
        max_rel,
        l2_rel,
        samples: pairs.len(),
    })
}
