//! Minimal complex dense matrix: just enough for inverse iteration on real
//! matrices with complex shifts.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::{MatError, Matrix};

/// Dense row-major complex matrix.
#[derive(Clone, Debug)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Real matrix shifted by a complex scalar: `M − s·I`.
    pub fn shifted(m: &Matrix, s: Complex64) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut c = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] = Complex64::new(m[(i, j)], 0.0);
            }
            c[(i, i)] -= s;
        }
        c
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Complex LU solve with partial pivoting. Near-singular pivots are
    /// clamped rather than rejected: inverse iteration relies on solving
    /// almost-singular systems.
    pub fn solve_clamped(&self, b: &[Complex64]) -> Result<Vec<Complex64>, MatError> {
        assert!(self.rows == self.cols && b.len() == self.rows);
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut x: Vec<Complex64> = b.to_vec();
        let scale = self.data.iter().map(|z| z.norm_sqr()).fold(0.0f64, f64::max);
        let tiny = (crate::fp::sqrt(scale).max(1.0)) * 1e-280;
        let at = |i: usize, j: usize| i * n + j;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[at(k, k)].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[at(i, k)].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(at(k, j), at(p, j));
                }
                x.swap(k, p);
            }
            if lu[at(k, k)].norm_sqr() < tiny * tiny {
                lu[at(k, k)] = Complex64::new(tiny, 0.0);
            }
            let pivot = lu[at(k, k)];
            for i in (k + 1)..n {
                let m = lu[at(i, k)] / pivot;
                lu[at(i, k)] = m;
                for j in (k + 1)..n {
                    let sub = m * lu[at(k, j)];
                    lu[at(i, j)] -= sub;
                }
                let sub = m * x[k];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let sub = lu[at(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= lu[at(i, i)];
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatError::Singular);
        }
        Ok(x)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_shifted_solve() {
        let m = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        // (M - 2i I) x = b has a unique solution; verify by residual
        let a = CMatrix::shifted(&m, Complex64::new(0.0, 2.0));
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let x = a.solve_clamped(&b).unwrap();
        for i in 0..2 {
            let mut r = -b[i];
            for j in 0..2 {
                r += a[(i, j)] * x[j];
            }
            assert!(r.norm() < 1e-13);
        }
    }
}
