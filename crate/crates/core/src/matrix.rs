//! Row-major feature matrix and the small dense linear algebra the solver
//! needs. Feature counts are small here, so the normal matrix is formed
//! explicitly and factorized in place.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Design matrix of real feature values, one row per object.
///
/// `has_intercept_column` records that a trailing constant-1 column has been
/// appended; fitting and standardization treat that column specially.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    has_intercept_column: bool,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values, validating finiteness and,
    /// when `has_intercept_column` is set, that the last column is 1.
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        has_intercept_column: bool,
    ) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {rows}x{cols} = {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if has_intercept_column && cols == 0 {
            return Err(Error::Shape(
                "intercept column flagged on a matrix with zero columns".into(),
            ));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite value {v} at row {}, column {}",
                    k / cols.max(1),
                    k % cols.max(1)
                )));
            }
        }
        if has_intercept_column {
            for i in 0..rows {
                let v = values[i * cols + cols - 1];
                if v != 1.0 {
                    return Err(Error::Domain(format!(
                        "intercept column must be exactly 1.0, row {i} has {v}"
                    )));
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            values,
            has_intercept_column,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(n, cols, values, false)
    }

    /// An `n x 0` matrix; vstack identity and the empty unlabeled block.
    pub fn empty(cols: usize, has_intercept_column: bool) -> Self {
        Self {
            rows: 0,
            cols,
            values: Vec::new(),
            has_intercept_column,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn has_intercept_column(&self) -> bool {
        self.has_intercept_column
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    /// Returns a copy with a constant-1 column appended.
    pub fn with_intercept(&self) -> Result<Self> {
        if self.has_intercept_column {
            return Err(Error::Shape(
                "matrix already carries an intercept column".into(),
            ));
        }
        let cols = self.cols + 1;
        let mut values = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            values.extend_from_slice(self.row(i));
            values.push(1.0);
        }
        Self::new(self.rows, cols, values, true)
    }

    /// Stacks `self` over `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols || self.has_intercept_column != other.has_intercept_column {
            return Err(Error::Shape(format!(
                "cannot stack {}x{} (intercept: {}) over {}x{} (intercept: {})",
                self.rows,
                self.cols,
                self.has_intercept_column,
                other.rows,
                other.cols,
                other.has_intercept_column
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::new(self.rows + other.rows, self.cols, values, self.has_intercept_column)
    }

    /// Copy of the first `k` rows.
    pub fn head(&self, k: usize) -> Result<Self> {
        if k > self.rows {
            return Err(Error::Shape(format!(
                "cannot take {k} rows from a {}-row matrix",
                self.rows
            )));
        }
        Self::new(
            k,
            self.cols,
            self.values[..k * self.cols].to_vec(),
            self.has_intercept_column,
        )
    }

    /// Matrix-vector product `X w`.
    pub fn mat_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.cols {
            return Err(Error::Shape(format!(
                "matrix has {} columns but the vector has {} entries",
                self.cols,
                w.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), w))
            .collect())
    }

    /// `X^T v` for a vector with one entry per row.
    pub fn t_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!(
                "matrix has {} rows but the vector has {} entries",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let r = self.row(i);
            let vi = v[i];
            for (o, &x) in out.iter_mut().zip(r) {
                *o += vi * x;
            }
        }
        Ok(out)
    }

    /// Gram matrix `X^T X`, dense row-major `cols x cols`.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.cols;
        let mut g = vec![0.0; d * d];
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..d {
                let ra = r[a];
                for b in a..d {
                    g[a * d + b] += ra * r[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g[a * d + b] = g[b * d + a];
            }
        }
        g
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the symmetric positive definite system `A x = b` in place via
/// Cholesky. `A` is row-major `d x d`. Fails on a non-positive pivot, which
/// signals a rank-deficient normal matrix.
pub(crate) fn cholesky_solve(a: &[f64], b: &[f64], context: &str) -> Result<Vec<f64>> {
    let d = b.len();
    debug_assert_eq!(a.len(), d * d);
    let mut l = a.to_vec();
    let max_diag = (0..d).map(|i| a[i * d + i]).fold(0.0_f64, f64::max);
    let pivot_floor = 1e-13 * max_diag.max(f64::MIN_POSITIVE);

    for j in 0..d {
        let mut diag = l[j * d + j];
        for k in 0..j {
            diag -= l[j * d + k] * l[j * d + k];
        }
        if !(diag > pivot_floor) || !diag.is_finite() {
            return Err(Error::RankDeficient(format!(
                "normal matrix is singular at column {j} ({context})"
            )));
        }
        let diag = diag.sqrt();
        l[j * d + j] = diag;
        for i in (j + 1)..d {
            let mut v = l[i * d + j];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = v / diag;
        }
    }

    // forward then back substitution
    let mut x = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            x[i] -= l[i * d + k] * x[k];
        }
        x[i] /= l[i * d + i];
    }
    for i in (0..d).rev() {
        for k in (i + 1)..d {
            x[i] -= l[k * d + i] * x[k];
        }
        x[i] /= l[i * d + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_wrong_value_count() {
        assert!(FeatureMatrix::new(2, 2, vec![1.0, 2.0, 3.0], false).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(FeatureMatrix::new(1, 2, vec![1.0, f64::NAN], false).is_err());
    }

    #[test]
    fn rejects_bad_intercept_column() {
        assert!(FeatureMatrix::new(2, 2, vec![0.5, 1.0, 0.5, 0.9], true).is_err());
        assert!(FeatureMatrix::new(2, 2, vec![0.5, 1.0, 0.5, 1.0], true).is_ok());
    }

    #[test]
    fn with_intercept_appends_ones() {
        let x = FeatureMatrix::from_rows(&[vec![2.0], vec![3.0]]).unwrap();
        let xi = x.with_intercept().unwrap();
        assert_eq!(xi.cols(), 2);
        assert!(xi.has_intercept_column());
        assert_eq!(xi.row(1), &[3.0, 1.0]);
        assert!(xi.with_intercept().is_err());
    }

    #[test]
    fn vstack_and_head_round_trip() {
        let a = FeatureMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = FeatureMatrix::from_rows(&[vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let s = a.vstack(&b).unwrap();
        assert_eq!(s.rows(), 3);
        assert_eq!(s.head(1).unwrap(), a);
        let e = FeatureMatrix::empty(2, false);
        assert_eq!(a.vstack(&e).unwrap(), a);
    }

    #[test]
    fn mat_vec_shapes_checked() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(x.mat_vec(&[1.0]).is_err());
        assert_eq!(x.mat_vec(&[1.0, 1.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        // A = [[4,2],[2,3]], b = [8, 7] -> x = [1, 5/3... ] solve by hand:
        // 4x + 2y = 8; 2x + 3y = 7 -> x = 1.25, y = 1.5
        let a = vec![4.0, 2.0, 2.0, 3.0];
        let x = cholesky_solve(&a, &[8.0, 7.0], "test").unwrap();
        assert_relative_eq!(x[0], 1.25, max_relative = 1e-12);
        assert_relative_eq!(x[1], 1.5, max_relative = 1e-12);
    }

    #[test]
    fn cholesky_reports_singularity() {
        // rank-1 matrix
        let a = vec![1.0, 2.0, 2.0, 4.0];
        let err = cholesky_solve(&a, &[1.0, 2.0], "unit test").unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)));
        assert!(err.to_string().contains("unit test"));
    }
}
