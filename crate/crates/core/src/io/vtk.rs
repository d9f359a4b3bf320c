//! Legacy ASCII VTK output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kinetic::GasModel;
use crate::velocity::MacroField;

/// Structured grid through the cell centroids with `rho`, `u`, `T` and `p` as
/// point data. The field must carry centroids and two space dimensions.
pub fn vtk_structured(field: &MacroField, gas: &GasModel, title: &str) -> Result<String> {
    let (ni, nj) = match field.dims[..] {
        [ni, nj] => (ni, nj),
        _ => {
            return Err(Error::Structural(format!(
                "VTK output needs a 2-d field, got dims {:?}",
                field.dims
            )))
        }
    };
    let centroids = field
        .centroids
        .as_ref()
        .ok_or_else(|| Error::Structural("VTK output needs cell centroids".into()))?;
    let n = field.len();
    let mut s = String::with_capacity(n * 160);
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = write!(
        s,
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET STRUCTURED_GRID\nDIMENSIONS {ni} {nj} 1\nPOINTS {n} double\n"
    );
    for c in centroids {
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", c[0], c[1], c[2]);
    }
    let _ = write!(s, "POINT_DATA {n}\nSCALARS rho double 1\nLOOKUP_TABLE default\n");
    for c in &field.cells {
        let _ = writeln!(s, "{:.17e}", c.rho);
    }
    let _ = writeln!(s, "VECTORS u double");
    for c in &field.cells {
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", c.u[0], c.u[1], c.u[2]);
    }
    let _ = write!(s, "SCALARS T double 1\nLOOKUP_TABLE default\n");
    for c in &field.cells {
        let _ = writeln!(s, "{:.17e}", c.t);
    }
    let _ = write!(s, "SCALARS p double 1\nLOOKUP_TABLE default\n");
    for c in &field.cells {
        let _ = writeln!(s, "{:.17e}", c.pressure(gas));
    }
    Ok(s)
}

pub fn write_vtk(field: &MacroField, gas: &GasModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = vtk_structured(field, gas, "rarevel macroscopic field")?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::PrimitiveState;

    #[test]
    fn layout_and_counts() {
        let cells = (0..6)
            .map(|k| PrimitiveState::new(1.0 + k as f64, [k as f64, 0.0, 0.0], 300.0))
            .collect();
        let cent = (0..6).map(|k| [(k % 3) as f64, (k / 3) as f64, 0.0]).collect();
        let f = MacroField::new(vec![3, 2], cells, Some(cent), 2).unwrap();
        let gas = GasModel::argon(2);
        let s = vtk_structured(&f, &gas, "t").unwrap();
        assert!(s.contains("DIMENSIONS 3 2 1\nPOINTS 6 double\n"));
        assert!(s.contains("POINT_DATA 6\n"));
        let p_line = s.lines().skip_while(|l| !l.starts_with("SCALARS p")).nth(2).unwrap();
        let p: f64 = p_line.parse().unwrap();
        assert!((p - 208.13 * 300.0).abs() < 1e-9);
        assert_eq!(s.lines().count(), 5 + 1 + 6 + 1 + 2 + 6 + 1 + 6 + 2 + 6 + 2 + 6);
    }

    #[test]
    fn rejects_fields_without_geometry() {
        let f = MacroField::from_states(vec![PrimitiveState::new(1.0, [0.0; 3], 1.0)], 2).unwrap();
        assert!(vtk_structured(&f, &GasModel::argon(2), "t").is_err());
    }
}
