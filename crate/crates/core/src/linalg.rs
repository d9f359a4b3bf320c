//! Small dense factorizations and the tridiagonal (Thomas) solve.

use crate::kinetic::MAX_MOMENTS;

pub type Mat = [[f64; MAX_MOMENTS]; MAX_MOMENTS];

/// LU factorization with partial pivoting of an `n x n` (n <= 5) matrix.
#[derive(Clone, Copy, Debug)]
pub struct SmallLu {
    n: usize,
    lu: Mat,
    perm: [usize; MAX_MOMENTS],
}

impl SmallLu {
    /// Returns `None` when a pivot falls below `rel_tol` times the largest entry.
    pub fn factor(a: &Mat, n: usize, rel_tol: f64) -> Option<Self> {
        let scale = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(a[i][j].abs()));
        if !(scale.is_finite() && scale > 0.0) {
            return None;
        }
        let mut lu = *a;
        let mut perm = [0, 1, 2, 3, 4];
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i][k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pmax <= rel_tol * scale {
                return None;
            }
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
            }
            let piv = lu[k][k];
            for i in k + 1..n {
                let l = lu[i][k] / piv;
                lu[i][k] = l;
                for j in k + 1..n {
                    lu[i][j] -= l * lu[k][j];
                }
            }
        }
        Some(SmallLu { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64; MAX_MOMENTS]) -> [f64; MAX_MOMENTS] {
        let n = self.n;
        let mut x = [0.0; MAX_MOMENTS];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }

    pub fn inverse(&self) -> Mat {
        let mut inv = [[0.0; MAX_MOMENTS]; MAX_MOMENTS];
        for c in 0..self.n {
            let mut e = [0.0; MAX_MOMENTS];
            e[c] = 1.0;
            let col = self.solve(&e);
            for r in 0..self.n {
                inv[r][c] = col[r];
            }
        }
        inv
    }
}

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place
/// (`lower[0]` and `upper[n-1]` are ignored). `scratch` must hold `n` values.
/// Returns the index of the first vanishing pivot on failure.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) -> Result<(), usize> {
    let n = rhs.len();
    if n == 0 {
        return Ok(());
    }
    let mut beta = diag[0];
    if beta.abs() < f64::MIN_POSITIVE {
        return Err(0);
    }
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta.abs() < f64::MIN_POSITIVE || !beta.is_finite() {
            return Err(i);
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}
