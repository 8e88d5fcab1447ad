//! LU, Cholesky and Householder-QR factorizations with the solve helpers
//! built on them (linear solve, least squares, rank and nullspace).

use alloc::vec;
use alloc::vec::Vec;

use super::{MatError, Matrix};
use crate::fp;

/// LU with partial pivoting, kept as packed factors plus the pivot row order.
struct Lu {
    lu: Matrix,
    piv: Vec<usize>,
    sign: f64,
}

fn lu_factor(a: &Matrix) -> Result<Lu, MatError> {
    assert!(a.is_square(), "LU requires a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let scale = a.max_abs().max(1.0);
    for k in 0..n {
        let mut p = k;
        let mut best = fp::abs(lu[(k, k)]);
        for i in (k + 1)..n {
            let v = fp::abs(lu[(i, k)]);
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= 1e-300 * scale {
            return Err(MatError::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            piv.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            for j in (k + 1)..n {
                let sub = m * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(Lu { lu, piv, sign })
}

impl Lu {
    fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.piv.len();
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, MatError> {
    assert_eq!(a.rows(), b.len());
    Ok(lu_factor(a)?.solve_vec(b))
}

/// Solve `A X = B` column by column.
pub fn lu_solve_many(a: &Matrix, b: &Matrix) -> Result<Matrix, MatError> {
    assert_eq!(a.rows(), b.rows());
    let f = lu_factor(a)?;
    let mut out = Matrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        let col: Vec<f64> = (0..b.rows()).map(|i| b[(i, j)]).collect();
        let x = f.solve_vec(&col);
        for i in 0..b.rows() {
            out[(i, j)] = x[i];
        }
    }
    Ok(out)
}

pub fn lu_det(a: &Matrix) -> f64 {
    match lu_factor(a) {
        Ok(f) => {
            let mut d = f.sign;
            for i in 0..a.rows() {
                d *= f.lu[(i, i)];
            }
            d
        }
        Err(_) => 0.0,
    }
}

/// Cholesky factor `L` with `A = L Lᵀ`; fails if `A` is not positive definite.
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Result<Self, MatError> {
        assert!(a.is_square());
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(MatError::NotPositiveDefinite);
                    }
                    l[(i, i)] = fp::sqrt(s);
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    /// Forward substitution `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut y = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.l[(i, j)] * y[j];
            }
            y[i] /= self.l[(i, i)];
        }
        y
    }

    /// Back substitution `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.l[(j, i)] * x[j];
            }
            x[i] /= self.l[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `L⁻¹ M` by forward substitution on each column.
    pub fn inv_times(&self, m: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for j in 0..m.cols() {
            let col: Vec<f64> = (0..m.rows()).map(|i| m[(i, j)]).collect();
            let y = self.solve_lower(&col);
            for i in 0..m.rows() {
                out[(i, j)] = y[i];
            }
        }
        out
    }
}

/// Column-pivoted Householder QR. Pivoting is deterministic (largest
/// remaining column norm, ties to the lowest index).
struct PivotedQr {
    /// Packed reflectors below the diagonal, R on and above it.
    qr: Matrix,
    /// Householder scalars.
    beta: Vec<f64>,
    /// Column permutation: factored column k came from input column `perm[k]`.
    perm: Vec<usize>,
    rank: usize,
}

fn qr_factor(a: &Matrix, rank_tol: f64) -> PivotedQr {
    let (m, n) = (a.rows(), a.cols());
    let steps = m.min(n);
    let mut qr = a.clone();
    let mut beta = vec![0.0; steps];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut colnorm: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| qr[(i, j)] * qr[(i, j)]).sum::<f64>())
        .collect();

    let mut r00 = 0.0f64;
    let mut rank = 0;
    for k in 0..steps {
        // pivot: swap in the column with the largest remaining norm
        let mut p = k;
        let mut best = colnorm[k];
        for j in (k + 1)..n {
            if colnorm[j] > best {
                best = colnorm[j];
                p = j;
            }
        }
        if p != k {
            for i in 0..m {
                let t = qr[(i, k)];
                qr[(i, k)] = qr[(i, p)];
                qr[(i, p)] = t;
            }
            perm.swap(k, p);
            colnorm.swap(k, p);
        }

        let mut norm = 0.0;
        for i in k..m {
            norm += qr[(i, k)] * qr[(i, k)];
        }
        let norm = fp::sqrt(norm);
        if k == 0 {
            r00 = norm;
        }
        if norm <= rank_tol * r00.max(1e-300) {
            break;
        }
        rank = k + 1;

        let alpha = -fp::sign(norm, qr[(k, k)]);
        let v0 = qr[(k, k)] - alpha;
        qr[(k, k)] = alpha;
        // reflector v = [1, qr[k+1..m, k]/v0]; beta = -v0/alpha
        for i in (k + 1)..m {
            qr[(i, k)] /= v0;
        }
        beta[k] = -v0 / alpha;

        for j in (k + 1)..n {
            let mut s = qr[(k, j)];
            for i in (k + 1)..m {
                s += qr[(i, k)] * qr[(i, j)];
            }
            s *= beta[k];
            qr[(k, j)] -= s;
            for i in (k + 1)..m {
                let sub = s * qr[(i, k)];
                qr[(i, j)] -= sub;
            }
            colnorm[j] = (colnorm[j] - qr[(k, j)] * qr[(k, j)]).max(0.0);
        }
    }
    PivotedQr { qr, beta, perm, rank }
}

impl PivotedQr {
    /// Apply Qᵀ to a vector in place.
    fn apply_qt(&self, x: &mut [f64]) {
        let m = self.qr.rows();
        for k in 0..self.rank {
            let mut s = x[k];
            for i in (k + 1)..m {
                s += self.qr[(i, k)] * x[i];
            }
            s *= self.beta[k];
            x[k] -= s;
            for i in (k + 1)..m {
                x[i] -= s * self.qr[(i, k)];
            }
        }
    }

    /// Apply Q to a vector in place.
    fn apply_q(&self, x: &mut [f64]) {
        let m = self.qr.rows();
        for k in (0..self.rank).rev() {
            let mut s = x[k];
            for i in (k + 1)..m {
                s += self.qr[(i, k)] * x[i];
            }
            s *= self.beta[k];
            x[k] -= s;
            for i in (k + 1)..m {
                x[i] -= s * self.qr[(i, k)];
            }
        }
    }
}

/// Rank-revealing least squares: returns the basic solution `X` minimizing
/// `‖A X − B‖_F` (free variables set to zero) together with the residual.
pub fn qr_lstsq(a: &Matrix, b: &Matrix) -> (Matrix, f64) {
    assert_eq!(a.rows(), b.rows());
    let f = qr_factor(a, 1e-12);
    let n = a.cols();
    let mut x = Matrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        let mut rhs: Vec<f64> = (0..b.rows()).map(|i| b[(i, j)]).collect();
        f.apply_qt(&mut rhs);
        // back-substitute on the leading rank x rank triangle
        let mut y = vec![0.0; n];
        for i in (0..f.rank).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..f.rank {
                s -= f.qr[(i, k)] * y[k];
            }
            y[i] = s / f.qr[(i, i)];
        }
        for i in 0..f.rank {
            x[(f.perm[i], j)] = y[i];
        }
    }
    let residual = (&(a * &x) - b).max_abs();
    (x, residual)
}

/// Orthonormal basis of the nullspace of `A` (columns). Uses a pivoted QR of
/// `Aᵀ`: the trailing columns of Q span null(A).
pub fn nullspace(a: &Matrix, rank_tol: f64) -> Matrix {
    let at = a.transpose();
    let d = at.rows();
    let f = qr_factor(&at, rank_tol);
    let dim = d - f.rank;
    let mut basis = Matrix::zeros(d, dim);
    for j in 0..dim {
        let mut e = vec![0.0; d];
        e[f.rank + j] = 1.0;
        f.apply_q(&mut e);
        for i in 0..d {
            basis[(i, j)] = e[i];
        }
    }
    basis
}

/// Numerical rank from a pivoted QR.
pub fn rank(a: &Matrix, rank_tol: f64) -> usize {
    qr_factor(a, rank_tol).rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = lu_solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
        assert!((lu_det(&a) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(lu_solve(&a, &[1.0, 2.0]).unwrap_err(), MatError::Singular);
    }

    #[test]
    fn cholesky_round_trip() {
        let a = Matrix::from_rows(&[&[4.0, 2.0, 0.6], &[2.0, 5.0, 1.0], &[0.6, 1.0, 3.0]]);
        let ch = Cholesky::new(&a).unwrap();
        let l = ch.factor();
        let diff = (&(l * &l.transpose()) - &a).max_abs();
        assert!(diff < 1e-14);
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let r = a.matvec(&x);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12 && (r[2] - 3.0).abs() < 1e-12);
        let not_pd = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(Cholesky::new(&not_pd).is_err());
    }

    #[test]
    fn lstsq_overdetermined() {
        // fit y = 2x + 1 through exact points
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 1.0], &[2.0, 1.0], &[3.0, 1.0]]);
        let b = Matrix::column(&[1.0, 3.0, 5.0, 7.0]);
        let (x, res) = qr_lstsq(&a, &b);
        assert!((x[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((x[(1, 0)] - 1.0).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn lstsq_reports_inconsistency() {
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let b = Matrix::column(&[0.0, 1.0]);
        let (_, res) = qr_lstsq(&a, &b);
        assert!(res > 0.4);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        let n = nullspace(&a, 1e-12);
        assert_eq!(n.cols(), 2);
        let prod = &a * &n;
        assert!(prod.max_abs() < 1e-12);
        // columns orthonormal
        let gram = &n.transpose() * &n;
        assert!((&gram - &Matrix::identity(2)).max_abs() < 1e-12);
        assert_eq!(rank(&a, 1e-12), 1);
    }
}
