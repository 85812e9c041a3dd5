//! Dense row-major complex matrices.
//!
//! Everything here is sized for the small operators that occur in desk-scale
//! circuits (at most a few thousand rows), so the algorithms are the naive
//! ones.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix rows have unequal lengths")]
    RaggedRows,
    #[error("matrix must not be empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, MatrixError> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(MatrixError::Empty);
        }
        let ncols = rows[0].len();
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(MatrixError::RaggedRows);
        }
        Ok(CMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// The permutation matrix sending basis vector `i` to `dest_of_src[i]`.
    pub fn permutation(dest_of_src: &[usize]) -> Self {
        let n = dest_of_src.len();
        let mut m = CMatrix::zeros(n, n);
        for (src, &dest) in dest_of_src.iter().enumerate() {
            debug_assert!(dest < n);
            m.set(dest, src, Complex64::ONE);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn set_column(&mut self, col: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.rows);
        for (r, v) in values.iter().enumerate() {
            self.set(r, col, *v);
        }
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimensions do not compose");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Kronecker product; `self` indexes the most significant bits.
    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.set(i * rhs.rows + k, j * rhs.cols + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max(‖A†A − I‖_F, ‖AA† − I‖_F)`; square matrices only.
    pub fn unitarity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "unitarity is defined for square matrices");
        let id = CMatrix::identity(self.rows);
        let d = self.dagger();
        let left = d.mul(self).frobenius_distance(&id);
        let right = self.mul(&d).frobenius_distance(&id);
        left.max(right)
    }

    /// Largest entrywise distance, or `None` when shapes differ.
    pub fn max_entry_distance(&self, other: &CMatrix) -> Option<f64> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (row, col): (usize, usize)) -> &Complex64 {
        &self.data[row * self.cols + col]
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                let z = self.get(r, c);
                write!(f, "{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_multiplication() {
        let m = CMatrix::from_rows(vec![
            vec![c(1.0, 2.0), c(0.0, -1.0)],
            vec![c(3.0, 0.0), c(0.5, 0.5)],
        ])
        .unwrap();
        assert_eq!(CMatrix::identity(2).mul(&m), m);
        assert_eq!(m.mul(&CMatrix::identity(2)), m);
    }

    #[test]
    fn kron_block_structure() {
        let x = CMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let k = CMatrix::identity(2).kron(&x);
        // block diagonal: X on each half
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(1, 0), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(1.0, 0.0));
        assert_eq!(k.get(3, 2), c(1.0, 0.0));
        assert_eq!(k.get(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn permutation_routes_basis_vectors() {
        let p = CMatrix::permutation(&[2, 0, 1]);
        let v = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(p.apply(&v), vec![c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]);
        assert!(p.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn hadamard_is_unitary_but_damped_gate_is_not() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_rows(vec![
            vec![c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(-s, 0.0)],
        ])
        .unwrap();
        assert!(h.unitarity_deviation() < 1e-12);

        let damped = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.999, 0.0)],
        ])
        .unwrap();
        let dev = damped.unitarity_deviation();
        assert!(dev > 1e-9, "deviation {dev} should be macroscopic");
        assert!((dev - 0.001999).abs() < 1e-4);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let bad = CMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        assert_eq!(bad, Err(MatrixError::RaggedRows));
    }
}
