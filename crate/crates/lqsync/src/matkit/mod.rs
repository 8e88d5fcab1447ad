//! Dense linear-algebra kernels shared by every other module.
//!
//! Everything here is written for desk-scale problems (dimensions in the
//! tens): dense storage, O(n³) factorizations, no blocking. Values are
//! immutable after construction and safe to share across threads.

mod care;
mod cmat;
mod eig;
mod expm;
mod factor;
mod symeig;
mod sylvester;

pub use care::solve_care;
pub use cmat::CMatrix;
pub use eig::{eig, inverse_iteration, is_hurwitz, is_hurwitz_complex, Spectrum};
pub use expm::expm_flow;
pub use factor::{lu_det, lu_solve, lu_solve_many, nullspace, qr_lstsq, Cholesky};
pub use symeig::{sym_eig, sym_sqrt};
pub use sylvester::solve_sylvester;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::fp;

/// Errors raised by the dense kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum MatError {
    /// Operand shapes are incompatible for the requested operation.
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// A factorization hit a (numerically) singular pivot.
    Singular,
    /// Sylvester precondition failed: σ(F) and σ(G) share an eigenvalue.
    SpectraOverlap { f_eig: (f64, f64), g_eig: (f64, f64), gap: f64 },
    /// The Hamiltonian has eigenvalues on the imaginary axis, so no
    /// stabilizing Riccati solution exists.
    NotStabilizable,
    /// A Riccati solve produced no symmetric positive definite stabilizing
    /// solution within tolerance.
    NoStabilizingSolution,
    /// A matrix required to be symmetric positive definite is not.
    NotPositiveDefinite,
    /// An iterative kernel failed to converge.
    ConvergenceFailure(&'static str),
}

impl fmt::Display for MatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {}x{}, got {}x{}", expected.0, expected.1, got.0, got.1)
            }
            MatError::Singular => write!(f, "matrix is singular to working precision"),
            MatError::SpectraOverlap { f_eig, g_eig, gap } => write!(
                f,
                "spectra overlap: eigenvalue {}+{}i of F within {:.3e} of eigenvalue {}+{}i of G",
                f_eig.0, f_eig.1, gap, g_eig.0, g_eig.1
            ),
            MatError::NotStabilizable => write!(f, "system is not stabilizable/detectable (imaginary-axis Hamiltonian eigenvalue)"),
            MatError::NoStabilizingSolution => write!(f, "no stabilizing Riccati solution found"),
            MatError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            MatError::ConvergenceFailure(what) => write!(f, "iteration failed to converge: {what}"),
        }
    }
}

impl core::error::Error for MatError {}

/// Dense row-major matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from nested row slices; rows must be rectangular.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn column(v: &[f64]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> f64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &x| a.max(fp::abs(x)))
    }

    pub fn norm_fro(&self) -> f64 {
        fp::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| fp::abs(self[(i, j)])).sum();
            best = best.max(s);
        }
        best
    }

    /// Spectral norm via the symmetric eigenvalues of MᵀM.
    pub fn norm_two(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = &self.transpose() * self;
        let (vals, _) = sym_eig(&gram);
        fp::sqrt(vals.last().copied().unwrap_or(0.0).max(0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// max |M − Mᵀ| relative to max |M|.
    pub fn asymmetry(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max(fp::abs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    pub fn symmetrize(&self) -> Matrix {
        debug_assert!(self.is_square());
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Copy `block` into `self` with top-left corner at (`r0`, `c0`).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn hstack(left: &Matrix, right: &Matrix) -> Matrix {
        assert_eq!(left.rows, right.rows);
        let mut m = Matrix::zeros(left.rows, left.cols + right.cols);
        m.set_block(0, 0, left);
        m.set_block(0, left.cols, right);
        m
    }

    pub fn vstack(top: &Matrix, bottom: &Matrix) -> Matrix {
        assert_eq!(top.cols, bottom.cols);
        let mut m = Matrix::zeros(top.rows + bottom.rows, top.cols);
        m.set_block(0, 0, top);
        m.set_block(top.rows, 0, bottom);
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self[(i, j)];
                if s == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Column-major vectorization vec(M).
    pub fn vec_col(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`Matrix::vec_col`]: reshape a column-stacked vector.
    pub fn from_vec_col(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        Matrix::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    /// Frobenius inner product ⟨self, other⟩.
    pub fn dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn inverse(&self) -> Result<Matrix, MatError> {
        lu_solve_many(self, &Matrix::identity(self.rows))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let mut line = String::new();
            for j in 0..self.cols {
                if j > 0 {
                    line.push_str(", ");
                }
                let mut buf = alloc::format!("{:>12.6}", self[(i, j)]);
                if buf.len() > 14 {
                    buf = alloc::format!("{:>12.4e}", self[(i, j)]);
                }
                line.push_str(&buf);
            }
            writeln!(f, "  [{line}]")?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow.iter()) {
                    *o += a * b;
                }
            }
        }
        out
    }
}
