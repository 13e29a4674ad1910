//! Small dense matrices over `f64`.
//!
//! Everything in this toolkit is desk-scale (d ≤ 8 species, a few dozen LP
//! variables), so a flat row-major `Vec<f64>` with partial-pivot Gaussian
//! elimination covers all linear-algebra needs. Serialized as nested rows so
//! report files stay human-readable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("matrix is singular within pivot tolerance")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dim(String),
}

/// Pivot magnitudes below this are treated as zero during elimination.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.concat() }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `self - s * I` (square only).
    pub fn shift_diag(&self, s: f64) -> Mat {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= s;
        }
        m
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul dims");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * x` for a column vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `xᵀ * self` for a row vector, returned as a plain vector.
    pub fn vecmat(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        (0..self.cols).map(|j| (0..self.rows).map(|i| x[i] * self[(i, j)]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Entrywise `self <= other` within `tol`.
    pub fn le(&self, other: &Mat, tol: f64) -> bool {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).all(|(a, b)| *a <= *b + tol)
    }

    /// Off-diagonal entries all ≥ -tol.
    pub fn is_metzler(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self[(i, j)] < -tol {
                    return false;
                }
            }
        }
        true
    }

    /// Solve `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, MatError> {
        if !self.is_square() {
            return Err(MatError::Dim("solve needs a square matrix".into()));
        }
        if b.len() != self.rows {
            return Err(MatError::Dim("rhs length".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if a[(p, k)].abs() < PIVOT_TOL {
                return Err(MatError::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                x.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                if f == 0.0 {
                    continue;
                }
                a[(i, k)] = 0.0;
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[(k, j)] * x[j];
            }
            x[k] = s / a[(k, k)];
        }
        Ok(x)
    }

    /// Inverse by Gaussian elimination with partial pivoting.
    pub fn invert(&self) -> Result<Mat, MatError> {
        if !self.is_square() {
            return Err(MatError::Dim("invert needs a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if a[(p, k)].abs() < PIVOT_TOL {
                return Err(MatError::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                    let t = inv[(k, j)];
                    inv[(k, j)] = inv[(p, j)];
                    inv[(p, j)] = t;
                }
            }
            let d = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= d;
                inv[(k, j)] /= d;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= f * a[(k, j)];
                    inv[(i, j)] -= f * inv[(k, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by LU (used only for cross-checks against `poly`).
    pub fn det(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if a[(p, k)].abs() < PIVOT_TOL {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Display for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Mat::from_rows(&rows))
    }
}

/// Unit basis vector `e_i` of length `n`.
pub fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_invert_agree() {
        let m = Mat::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]);
        let x = m.solve(&[1.0, 0.0]).unwrap();
        assert!((m.matvec(&x)[0] - 1.0).abs() < 1e-12);
        assert!(m.matvec(&x)[1].abs() < 1e-12);
        let inv = m.invert().unwrap();
        let prod = m.matmul(&inv);
        assert!(prod.max_abs_diff(&Mat::identity(2)) < 1e-12);
        // -(1/3) [[2,1],[1,2]]
        assert!((inv[(0, 0)] + 2.0 / 3.0).abs() < 1e-12);
        assert!((inv[(0, 1)] + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(m.invert(), Err(MatError::Singular));
    }

    #[test]
    fn det_matches_hand_values() {
        let m = Mat::from_rows(&[vec![-2.0, 4.0], vec![4.0, -2.0]]);
        assert!((m.det() - (4.0 - 16.0)).abs() < 1e-12);
    }
}
