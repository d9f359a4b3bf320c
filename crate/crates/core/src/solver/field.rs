//! Distribution pair storage with two ghost layers per side.

/// `f` and `g` per cell, velocity index fastest. Cells are addressed with
/// signed indices `-2..n+2` in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionField {
    pub ni: usize,
    pub nj: usize,
    pub nq: usize,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

pub const GHOSTS: usize = 2;

impl DistributionField {
    pub fn zeros(ni: usize, nj: usize, nq: usize) -> Self {
        let n = (ni + 2 * GHOSTS) * (nj + 2 * GHOSTS) * nq;
        DistributionField {
            ni,
            nj,
            nq,
            f: vec![0.0; n],
            g: vec![0.0; n],
        }
    }

    #[inline]
    pub fn offset(&self, i: isize, j: isize) -> usize {
        let w = self.ni + 2 * GHOSTS;
        (((j + GHOSTS as isize) as usize) * w + (i + GHOSTS as isize) as usize) * self.nq
    }

    #[inline]
    pub fn f_at(&self, i: isize, j: isize) -> &[f64] {
        let o = self.offset(i, j);
        &self.f[o..o + self.nq]
    }

    #[inline]
    pub fn g_at(&self, i: isize, j: isize) -> &[f64] {
        let o = self.offset(i, j);
        &self.g[o..o + self.nq]
    }

    #[inline]
    pub fn f_at_mut(&mut self, i: isize, j: isize) -> &mut [f64] {
        let o = self.offset(i, j);
        &mut self.f[o..o + self.nq]
    }

    #[inline]
    pub fn g_at_mut(&mut self, i: isize, j: isize) -> &mut [f64] {
        let o = self.offset(i, j);
        &mut self.g[o..o + self.nq]
    }

    /// Copies cell `src` into cell `dst` (both arrays).
    pub fn copy_cell(&mut self, src: (isize, isize), dst: (isize, isize)) {
        let (s, d, n) = (self.offset(src.0, src.1), self.offset(dst.0, dst.1), self.nq);
        self.f.copy_within(s..s + n, d);
        self.g.copy_within(s..s + n, d);
    }

    /// Iterator over interior cells in storage order (`i` fastest).
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nj).flat_map(move |j| (0..self.ni).map(move |i| (i, j)))
    }

    /// Number of negative interior `f` values.
    pub fn negative_count(&self) -> usize {
        self.interior()
            .map(|(i, j)| self.f_at(i as isize, j as isize).iter().filter(|&&x| x < 0.0).count())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.f.iter().chain(&self.g).all(|x| x.is_finite())
    }
}
