//! Dense complex matrix type used by every module.
//!
//! Row-major storage of `Complex64` entries. All dimensions in this crate are
//! tiny (at most a few tens of antennas), so the implementation favors clarity
//! and determinism over blocked/SIMD kernels: identical inputs produce
//! bit-identical outputs on every run.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Dense complex matrix (row-major). Rows and columns are always ≥ 1.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.at(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mat {
    /// All-zeros matrix. Panics on zero dimensions (programmer error).
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Mat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix by evaluating `f(row, col)` for every entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from a row-major slice of entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Mat {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        let mut m = Mat::zeros(rows, cols);
        m.data.copy_from_slice(entries);
        m
    }

    /// Builds a matrix from a row-major slice of real entries.
    pub fn from_real_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Mat {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Mat::from_fn(rows, cols, |i, j| Complex64::new(entries[i * cols + j], 0.0))
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Square diagonal matrix from real diagonal values.
    pub fn from_diag(diag: &[f64]) -> Mat {
        let n = diag.len();
        Mat::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0)
        })
    }

    /// Column vector from a slice of complex entries.
    pub fn col_from_slice(entries: &[Complex64]) -> Mat {
        Mat::from_row_slice(entries.len(), 1, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry accessor (row `i`, column `j`).
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    /// Mutable entry accessor.
    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }

    /// Raw row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// `j`-th column as a fresh column vector.
    pub fn col(&self, j: usize) -> Mat {
        Mat::from_fn(self.rows, 1, |i, _| self.at(i, j))
    }

    /// New matrix whose columns are the listed columns of `self`, in order.
    pub fn select_cols(&self, indices: &[usize]) -> Mat {
        assert!(!indices.is_empty(), "column selection must be non-empty");
        Mat::from_fn(self.rows, indices.len(), |i, j| self.at(i, indices[j]))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions must agree: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    /// Fused `self* · rhs` (avoids materializing the adjoint).
    pub fn adjoint_mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(
            self.rows, rhs.rows,
            "adjoint_mul requires matching row counts: {}x{} vs {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Mat::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i].conj();
                let rhs_row = k * rhs.cols;
                let out_row = i * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[out_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    /// Gram matrix `self* · self`.
    pub fn gram(&self) -> Mat {
        self.adjoint_mul(self)
    }

    /// Entry-wise sum `self + rhs`.
    pub fn add_mat(&self, rhs: &Mat) -> Mat {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "add requires equal shapes"
        );
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
        out
    }

    /// Entry-wise difference `self − rhs`.
    pub fn sub_mat(&self, rhs: &Mat) -> Mat {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "sub requires equal shapes"
        );
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
        out
    }

    /// In-place `self += alpha · rhs`.
    pub fn axpy(&mut self, alpha: Complex64, rhs: &Mat) {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "axpy requires equal shapes"
        );
        for (o, r) in self.data.iter_mut().zip(&rhs.data) {
            *o += alpha * r;
        }
    }

    /// Scaled copy by a real factor.
    pub fn scale(&self, factor: f64) -> Mat {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= factor;
        }
        out
    }

    /// Scaled copy by a complex factor.
    pub fn scale_c(&self, factor: Complex64) -> Mat {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= factor;
        }
        out
    }

    /// Squared Frobenius norm `Σ |a_ij|²`.
    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared Euclidean norm of row `i`.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        (0..self.cols).map(|j| self.at(i, j).norm_sqr()).sum()
    }

    /// Diagonal entries (up to `min(rows, cols)`).
    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).collect()
    }

    /// True when every entry is finite (no NaN / infinities).
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every entry matches `other` within absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &Mat, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Nearest Hermitian matrix `(A + A*)/2` (square input only).
    pub fn hermitian_part(&self) -> Mat {
        assert_eq!(self.rows, self.cols, "hermitian_part requires square input");
        Mat::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.at(i, j) + self.at(j, i).conj())
        })
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        Mat::mul(self, rhs)
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.add_mat(rhs)
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.sub_mat(rhs)
    }
}
