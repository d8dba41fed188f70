use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::Scalar;

/// Dense row-major matrix over a [`Scalar`] backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Elimination hit an unusable pivot in the given column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Matrix unit `E_aa` of size `n`.
    pub fn unit(n: usize, a: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(a, a)] = S::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: Vec<S>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn max_norm(&self) -> S {
        let mut best = S::zero();
        for v in &self.data {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b;
                    out.data[i * other.cols + j] += &prod;
                }
            }
        }
        out
    }

    /// Copy of rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    ///
    /// A pivot is rejected by [`Scalar::negligible_pivot`] relative to the
    /// max-norm of `self`: exactly zero for rationals, below `1e-12` relative
    /// for floats.
    pub fn solve(&self, rhs: &Self) -> Result<Self, SingularMatrix> {
        assert!(self.is_square(), "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let n = self.rows;
        let m = rhs.cols;
        let scale = self.max_norm();
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].abs();
            for r in col + 1..n {
                let v = a[(r, col)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.negligible_pivot(&scale) {
                return Err(SingularMatrix { column: col });
            }
            if piv != col {
                a.swap_rows(piv, col);
                b.swap_rows(piv, col);
            }
            let p = a[(col, col)].clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / &p;
                for c in col..n {
                    let d = f.clone() * &a[(col, c)];
                    a[(r, c)] -= &d;
                }
                for c in 0..m {
                    let d = f.clone() * &b[(col, c)];
                    b[(r, c)] -= &d;
                }
            }
        }
        for col in (0..n).rev() {
            let p = a[(col, col)].clone();
            for c in 0..m {
                let mut acc = b[(col, c)].clone();
                for k in col + 1..n {
                    let d = a[(col, k)].clone() * &b[(k, c)];
                    acc -= &d;
                }
                b[(col, c)] = acc / &p;
            }
        }
        Ok(b)
    }

    /// Solves `X · self = rhs` for a row-oriented right-hand side.
    pub fn solve_left(&self, rhs: &Self) -> Result<Self, SingularMatrix> {
        Ok(self.transpose().solve(&rhs.transpose())?.transpose())
    }

    pub fn inverse(&self) -> Result<Self, SingularMatrix> {
        self.solve(&Self::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Add<&Mat<S>> for Mat<S> {
    type Output = Mat<S>;
    fn add(self, rhs: &Mat<S>) -> Mat<S> {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }
}

impl<S: Scalar> Sub<&Mat<S>> for Mat<S> {
    type Output = Mat<S>;
    fn sub(self, rhs: &Mat<S>) -> Mat<S> {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }
}

impl<S: Scalar> Mul<&Mat<S>> for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        self.matmul(rhs)
    }
}

impl<S: Scalar> Neg for Mat<S> {
    type Output = Mat<S>;
    fn neg(self) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().map(|v| -v).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ratio, Rational};

    fn hilbert(n: usize) -> Mat<Rational> {
        Mat::from_fn(n, n, |i, j| ratio(1, (i + j + 1) as i64))
    }

    #[test]
    fn hilbert_inverse_2x2() {
        let inv = hilbert(2).inverse().unwrap();
        let expect = Mat::from_rows(vec![vec![ratio(4, 1), ratio(-6, 1)], vec![ratio(-6, 1), ratio(12, 1)]]);
        assert_eq!(inv, expect);
    }

    #[test]
    fn solve_round_trip_exact() {
        let h = hilbert(5);
        let rhs = Mat::from_fn(5, 2, |i, j| ratio((i * 3 + j) as i64 - 4, 1));
        let x = h.solve(&rhs).unwrap();
        assert_eq!(h.matmul(&x), rhs);
        let left = h.solve_left(&rhs.transpose()).unwrap();
        assert_eq!(left.matmul(&h), rhs.transpose());
    }

    #[test]
    fn singular_reported() {
        let m = Mat::from_rows(vec![vec![ratio(1, 1), ratio(2, 1)], vec![ratio(2, 1), ratio(4, 1)]]);
        assert_eq!(m.inverse().unwrap_err(), SingularMatrix { column: 1 });
        let f = Mat::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]]);
        assert!(f.inverse().is_err());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = Mat::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv, m);
    }

    #[test]
    fn submatrix_tiles() {
        let h = hilbert(3);
        let tl = h.submatrix(0, 2, 0, 2);
        let mut back = Mat::zeros(3, 3);
        back.set_submatrix(0, 0, &tl);
        back.set_submatrix(0, 2, &h.submatrix(0, 2, 2, 3));
        back.set_submatrix(2, 0, &h.submatrix(2, 3, 0, 3));
        assert_eq!(back, h);
    }
}
