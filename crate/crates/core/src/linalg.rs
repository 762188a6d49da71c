//! Banded matrices and LU factorization with partial pivoting.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Square matrix with `lower` sub- and `upper` super-diagonals, stored row by
/// row: entry `(i, j)` lives at `i * (lower + upper + 1) + (j + lower - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        BandedMatrix {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        m.data.fill(1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.n && j < self.n && self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = value;
    }

    /// Column range of row `i` inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    /// Iterates `(j, value)` over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let base = i * self.width() + self.lower - i;
        self.row_range(i).map(move |j| (j, self.data[base + j]))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).map(|(j, a)| a * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = BandedMatrix::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                t.set(j, i, a);
            }
        }
        t
    }

    /// Principal submatrix on the (sorted) index list `keep`.
    pub fn submatrix(&self, keep: &[usize]) -> BandedMatrix {
        let pos = |j: usize| keep.binary_search(&j).ok();
        let mut lower = 0;
        let mut upper = 0;
        for (a, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if v == 0.0 {
                    continue;
                }
                if let Some(b) = pos(j) {
                    lower = lower.max(a.saturating_sub(b));
                    upper = upper.max(b.saturating_sub(a));
                }
            }
        }
        let mut out = BandedMatrix::zeros(keep.len(), lower, upper);
        for (a, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if v == 0.0 {
                    continue;
                }
                if let Some(b) = pos(j) {
                    out.set(a, b, v);
                }
            }
        }
        out
    }

    /// `alpha·I + beta·self`.
    pub fn shifted(&self, alpha: f64, beta: f64) -> BandedMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= beta);
        for i in 0..self.n {
            let d = out.get(i, i);
            out.set(i, i, d + alpha);
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                d[(i, j)] = a;
            }
        }
        d
    }
}

/// Pivots below this are treated as exact zeros of a singular matrix.
fn singular_threshold(scale: f64, n: usize) -> f64 {
    scale * n as f64 * 1e-14
}

/// LU factors of a banded matrix, `P·A = L·U`.
///
/// `U` gains up to `lower` extra super-diagonals from row interchanges, so the
/// working storage holds `lower + upper` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    // row i stores columns i - lower ..= i + lower + upper
    lu: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        let n = a.n;
        let kl = a.lower;
        let ku = kl + a.upper;
        let w = kl + ku + 1;
        let mut lu = vec![0.0; n * w];
        let idx = |i: usize, j: usize| i * w + j + kl - i;
        for i in 0..n {
            for (j, v) in a.row(i) {
                lu[idx(i, j)] = v;
            }
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku).min(n - 1);
            let mut p = k;
            let mut best = lu[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if best <= singular_threshold(scale, n) || !best.is_finite() {
                return Err(Error::Singular { row: k, pivot: best });
            }
            if p != k {
                for j in k..=last_col {
                    lu.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = lu[idx(k, k)];
            for i in k + 1..=last_row {
                let l = lu[idx(i, k)] / pivot;
                lu[idx(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        lu[idx(i, j)] -= l * lu[idx(k, j)];
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            lower: kl,
            upper: ku,
            lu,
            pivots,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.lower, self.upper);
        let w = kl + ku + 1;
        let idx = |i: usize, j: usize| i * w + j + kl - i;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    b[i] -= self.lu[idx(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + ku).min(n - 1) {
                acc -= self.lu[idx(i, j)] * b[j];
            }
            b[i] = acc / self.lu[idx(i, i)];
        }
    }
}

/// Factorization reused across many right-hand sides. Matrices whose band
/// covers most of the matrix go through a dense LU instead.
#[derive(Debug, Clone)]
pub enum LinearSolver {
    Banded(BandedLu),
    Dense(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl LinearSolver {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        let n = a.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("empty linear system".into()));
        }
        if 2 * (a.lower() + a.upper()) >= n {
            let lu = a.to_dense().lu();
            let u = lu.u();
            let scale = a.max_abs().max(f64::MIN_POSITIVE);
            for k in 0..n {
                let piv = u[(k, k)].abs();
                if piv <= singular_threshold(scale, n) || !piv.is_finite() {
                    return Err(Error::Singular { row: k, pivot: piv });
                }
            }
            Ok(LinearSolver::Dense(lu))
        } else {
            Ok(LinearSolver::Banded(BandedLu::factor(a)?))
        }
    }

    /// Forces the banded path regardless of fill.
    pub fn factor_banded(a: &BandedMatrix) -> Result<Self> {
        Ok(LinearSolver::Banded(BandedLu::factor(a)?))
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        match self {
            LinearSolver::Banded(lu) => lu.solve_in_place(b),
            LinearSolver::Dense(lu) => {
                let mut v = DVector::from_column_slice(b);
                lu.solve_mut(&mut v);
                b.copy_from_slice(v.as_slice());
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> BandedMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in a.row_range(i) {
                a.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        a
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]]
        let mut a = BandedMatrix::zeros(2, 1, 1);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        let lu = BandedLu::factor(&a).unwrap();
        let mut b = vec![2.0, 3.0];
        lu.solve_in_place(&mut b);
        assert_eq!(b, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = BandedMatrix::zeros(3, 1, 1);
        assert!(matches!(BandedLu::factor(&a), Err(Error::Singular { .. })));
        assert!(matches!(LinearSolver::factor(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn submatrix_shrinks_band() {
        let a = random_banded(8, 2, 3, 4);
        let keep = [1, 2, 5, 6];
        let s = a.submatrix(&keep);
        for (p, &i) in keep.iter().enumerate() {
            for (q, &j) in keep.iter().enumerate() {
                assert_eq!(s.get(p, q), a.get(i, j));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn banded_and_dense_solves_agree(n in 1usize..40, kl in 0usize..6, ku in 0usize..6, seed in 0u64..1000) {
            let a = random_banded(n, kl, ku, seed).shifted(4.0, 1.0);
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let x = LinearSolver::factor_banded(&a).unwrap().solve(&b);
            let xd = a.to_dense().lu().solve(&DVector::from_column_slice(&b)).unwrap();
            for i in 0..n {
                prop_assert!((x[i] - xd[i]).abs() <= 1e-10 * (1.0 + xd[i].abs()));
            }
            let r = a.matvec(&x);
            for i in 0..n {
                prop_assert!((r[i] - b[i]).abs() <= 1e-10);
            }
        }
    }
}
