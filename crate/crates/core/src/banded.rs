//! Banded matrices and direct elimination with partial pivoting.
//!
//! Storage is row-major over the band: row `i` keeps columns
//! `i - lower ..= i + upper`. Elimination works on a copy whose rows are
//! widened by `lower` extra super-diagonals to hold pivoting fill-in, the
//! same layout LAPACK's `gbtrf` uses column-wise.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
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

    /// Largest of the two half-bandwidths.
    pub fn bandwidth(&self) -> usize {
        self.lower.max(self.upper)
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.offset(i, j);
        self.data[k] = value;
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.offset(i, j);
        self.data[k] += value;
    }

    /// Replaces row `i` with zeros.
    pub fn clear_row(&mut self, i: usize) {
        let w = self.width();
        self.data[i * w..(i + 1) * w].fill(0.0);
    }

    /// Non-zero column range of row `i` as stored.
    pub fn row_columns(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(self.lower)..=(i + self.upper).min(self.n - 1)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Solves `A x = rhs` by banded Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factorize()?.solve(rhs)
    }

    /// LU factorization with partial pivoting.
    pub fn factorize(&self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.lower;
        let ku = kl + self.upper;
        let w = kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            data: vec![0.0; n * w],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in self.row_columns(i) {
                let k = lu.idx(i, j);
                lu.data[k] = self.get(i, j);
            }
        }
        let tiny = f64::EPSILON * self.max_abs();

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tiny || best == 0.0 {
                return Err(Error::SingularPivot { row: k });
            }
            lu.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = lu.idx(i, k);
                let l = lu.data[ik] / pivot;
                // the multiplier stays in the eliminated slot
                lu.data[ik] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let kj = lu.data[lu.idx(k, j)];
                    let ij = lu.idx(i, j);
                    lu.data[ij] -= l * kj;
                }
            }
        }
        Ok(lu)
    }
}

/// Factors produced by [`BandedMatrix::factorize`].
///
/// Row `i` holds columns `i - kl ..= i + ku` where `ku` includes room for
/// pivoting fill-in. Interchanges are applied to trailing columns only, so
/// the forward sweep replays them in order.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: rhs.len(),
            });
        }
        let mut b = rhs.to_vec();
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            if bk == 0.0 {
                continue;
            }
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.data[self.idx(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + self.ku).min(n - 1) {
                s -= self.data[self.idx(k, j)] * b[j];
            }
            b[k] = s / self.data[self.idx(k, k)];
        }
        Ok(b)
    }
}

/// `||A x - b||_inf`.
pub fn residual_inf(matrix: &BandedMatrix, x: &[f64], rhs: &[f64]) -> f64 {
    matrix
        .mul_vec(x)
        .iter()
        .zip(rhs)
        .fold(0.0, |m, (ax, b)| m.max((ax - b).abs()))
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination with partial pivoting, kept deliberately naive.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= l * a[k][j];
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    fn to_dense(m: &BandedMatrix) -> Vec<Vec<f64>> {
        (0..m.dim())
            .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
            .collect()
    }

    #[test]
    fn diagonal_system_returns_scaled_rhs() {
        let mut m = BandedMatrix::zeros(4, 1, 1);
        for i in 0..4 {
            m.set(i, i, 1.0);
        }
        let x = m.solve(&[1.0, -2.0, 3.0, 4.5]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.0, 4.5]);
    }

    #[test]
    fn needs_pivoting() {
        // zero on the leading diagonal
        let mut m = BandedMatrix::zeros(3, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 2, 1.0);
        m.set(2, 1, 1.0);
        m.set(2, 2, 1.0);
        let x = m.solve(&[2.0, 4.0, 5.0]).unwrap();
        let want = dense_solve(to_dense(&m), vec![2.0, 4.0, 5.0]);
        for (a, b) in x.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut m = BandedMatrix::zeros(3, 1, 1);
        m.set(0, 0, 1.0);
        m.set(1, 0, 1.0);
        m.set(2, 2, 1.0);
        assert!(matches!(m.solve(&[1.0, 1.0, 1.0]), Err(Error::SingularPivot { .. })));
    }

    #[test]
    #[should_panic(expected = "outside band")]
    fn set_outside_band_panics() {
        let mut m = BandedMatrix::zeros(5, 1, 1);
        m.set(0, 3, 1.0);
    }

    proptest! {
        #[test]
        fn agrees_with_dense_elimination(
            n in 3usize..25,
            lower in 1usize..4,
            upper in 1usize..4,
            seed in proptest::collection::vec(-1.0f64..1.0, 200),
        ) {
            let mut m = BandedMatrix::zeros(n, lower, upper);
            let mut s = seed.iter().cycle();
            for i in 0..n {
                for j in m.row_columns(i) {
                    m.set(i, j, *s.next().unwrap());
                }
                // keep it comfortably nonsingular
                m.add(i, i, 4.0);
            }
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let x = m.solve(&b).unwrap();
            let want = dense_solve(to_dense(&m), b.clone());
            for (a, w) in x.iter().zip(&want) {
                prop_assert!((a - w).abs() < 1e-10 * (1.0 + w.abs()));
            }
            prop_assert!(residual_inf(&m, &x, &b) < 1e-12);
            // a factorization is reusable across right-hand sides
            let lu = m.factorize().unwrap();
            let b2: Vec<f64> = b.iter().map(|v| 2.0 * v - 1.0).collect();
            let x2 = lu.solve(&b2).unwrap();
            prop_assert!(residual_inf(&m, &x2, &b2) < 1e-12);
        }
    }
}
