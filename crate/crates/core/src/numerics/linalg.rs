//! Small dense vectors and matrices.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; [`Matrix`] is row-major with
//! explicit dimensions. Dimension mismatches are programming errors and
//! panic. Generic helpers at the bottom operate on row-major square
//! matrices stored as slices of any [`Scalar`].

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use super::dual::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (r, &v) in values.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix dimension mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.sub(&self.transpose()).max_abs() <= tol
    }

    /// LU factorization with partial pivoting. `None` when a pivot falls
    /// below `rel_tol` times the largest entry.
    pub fn lu(&self, rel_tol: f64) -> Option<Lu> {
        assert_eq!(self.rows, self.cols, "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.max_abs();
        if n > 0 && scale == 0.0 {
            return None;
        }
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, a[r * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(pmax > rel_tol * scale) {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                for c in k + 1..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
        Some(Lu { n, a, perm, sign })
    }

    /// Solve `A x = b`; `None` if `A` is numerically singular.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        self.lu(1e-14).map(|lu| lu.solve(b))
    }

    pub fn determinant(&self) -> f64 {
        match self.lu(0.0) {
            Some(lu) => lu.determinant(),
            None => 0.0,
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let lu = self.lu(1e-14)?;
        let n = self.rows;
        let mut inv = Matrix::zeros(n, n);
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            inv.set_column(c, &lu.solve(&e));
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

/// Packed LU factors.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.a[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.a[r * n + c] * x[c];
            }
            x[r] /= self.a[r * n + r];
        }
        x
    }

    pub fn determinant(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).product::<f64>() * self.sign
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "axpy length mismatch");
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `‖a − b‖∞`.
pub fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn lift<S: Scalar>(x: &[f64]) -> Vec<S> {
    x.iter().map(|&v| S::from_f64(v)).collect()
}

pub fn values<S: Scalar>(x: &[S]) -> Vec<f64> {
    x.iter().map(Scalar::value).collect()
}

pub fn dot_generic<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Row-major `n×n` product.
pub fn square_mul<S: Scalar>(a: &[S], b: &[S], n: usize) -> Vec<S> {
    assert!(a.len() == n * n && b.len() == n * n, "square_mul dimension mismatch");
    let mut out = vec![S::zero(); n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a[r * n + k];
            for c in 0..n {
                out[r * n + c] += x * b[k * n + c];
            }
        }
    }
    out
}

pub fn square_transpose<S: Scalar>(a: &[S], n: usize) -> Vec<S> {
    let mut out = a.to_vec();
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = a[r * n + c];
        }
    }
    out
}

pub fn square_identity<S: Scalar>(n: usize) -> Vec<S> {
    let mut out = vec![S::zero(); n * n];
    for i in 0..n {
        out[i * n + i] = S::one();
    }
    out
}

pub fn trace_generic<S: Scalar>(a: &[S], n: usize) -> S {
    (0..n).fold(S::zero(), |acc, i| acc + a[i * n + i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]);
        let x = a.solve(&[1.0, 2.0]).unwrap();
        assert!(dist_inf(&a.mul_vec(&x), &[1.0, 2.0]) < 1e-15);
        assert!((a.determinant() - 10.0).abs() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.solve(&[1.0, 1.0]).is_none());
        assert!(Matrix::zeros(3, 3).inverse().is_none());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(a.solve(&[3.0, 5.0]).unwrap(), vec![5.0, 3.0]);
        assert_eq!(a.determinant(), -1.0);
    }

    #[test]
    fn inverse_and_product() {
        let a = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).sub(&Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn no_broadcasting() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(3, 2);
        let _ = a.add(&b);
    }

    #[test]
    fn generic_square_helpers_agree_with_matrix() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.5, -1.0, 2.0, 1.5];
        let p = square_mul(&a, &b, 2);
        let m = &Matrix::from_row_slice(2, 2, &a) * &Matrix::from_row_slice(2, 2, &b);
        assert_eq!(p, m.as_slice());
        assert_eq!(square_transpose(&a, 2), vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(trace_generic(&a, 2), 5.0);
    }
}
