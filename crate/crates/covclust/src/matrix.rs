//! Small dense matrices and the cached symmetric distance matrix.

use crate::error::{Error, Result};

/// Row-major dense matrix. Covariance blocks here are tiny (side = window
/// count, typically <= 7), so a flat Vec is all we need.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Replaces A by (A + A^T)/2. Only meaningful for square matrices.
    pub fn symmetrize(&mut self) {
        debug_assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn shape_error(&self, other: &Matrix) -> Error {
        Error::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    /// Frobenius norm of A - B.
    pub fn frobenius_distance(&self, other: &Matrix) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(self.shape_error(other));
        }
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sum.sqrt())
    }
}

/// Symmetric matrix of pairwise path dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl PairwiseMatrix {
    /// Builds from per-pair values listed in (i, j), i < j order.
    pub fn from_pairs(n: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), n * (n - 1) / 2);
        let mut m = Self { n, data: vec![0.0; n * n] };
        let mut it = values.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().unwrap();
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds from a full square of entries; enforces symmetry and a zero
    /// diagonal within `tol`, then stores the exact symmetric average.
    pub fn from_square(entries: Matrix, tol: f64) -> Result<Self> {
        if entries.rows() != entries.cols() {
            return Err(Error::DimensionMismatch {
                left_rows: entries.rows(),
                left_cols: entries.cols(),
                right_rows: entries.cols(),
                right_cols: entries.cols(),
            });
        }
        let n = entries.rows();
        let mut m = Self { n, data: vec![0.0; n * n] };
        for i in 0..n {
            let d = entries.get(i, i);
            if d.abs() > tol {
                return Err(Error::Malformed {
                    line: 0,
                    message: format!("distance matrix diagonal entry ({i},{i}) = {d} is not zero"),
                });
            }
            for j in (i + 1)..n {
                let a = entries.get(i, j);
                let b = entries.get(j, i);
                if (a - b).abs() > tol * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Malformed {
                        line: 0,
                        message: format!("distance matrix is not symmetric at ({i},{j}): {a} vs {b}"),
                    });
                }
                let v = 0.5 * (a + b);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Scales every entry by a positive constant; partitions produced by the
    /// clustering algorithms are invariant under this.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }

    /// Largest off-diagonal entry.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_distance_of_identity_and_zero() {
        let mut eye = Matrix::zeros(2, 2);
        eye.set(0, 0, 1.0);
        eye.set(1, 1, 1.0);
        let zero = Matrix::zeros(2, 2);
        let d = eye.frobenius_distance(&zero).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(eye.frobenius_distance(&eye).unwrap(), 0.0);
    }

    #[test]
    fn frobenius_distance_rejects_shape_mismatch() {
        let a = Matrix::zeros(2, 2);
        let b = Matrix::zeros(3, 2);
        assert!(a.frobenius_distance(&b).is_err());
    }

    #[test]
    fn pairwise_from_pairs_is_symmetric() {
        let m = PairwiseMatrix::from_pairs(3, &[1.0, 2.0, 3.0]);
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(2, 1), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn from_square_rejects_asymmetry() {
        let bad = Matrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(PairwiseMatrix::from_square(bad, 1e-9).is_err());
        let good = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(PairwiseMatrix::from_square(good, 1e-9).is_ok());
    }
}
