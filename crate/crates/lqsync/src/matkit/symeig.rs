//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use alloc::vec::Vec;

use super::Matrix;
use crate::fp;

/// Eigendecomposition of a symmetric matrix: returns eigenvalues in
/// ascending order and the orthogonal matrix whose columns are the matching
/// eigenvectors. The input is symmetrized first, so mild asymmetry from
/// accumulated round-off is tolerated.
pub fn sym_eig(m: &Matrix) -> (Vec<f64>, Matrix) {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.symmetrize();
    let mut v = Matrix::identity(n);
    if n <= 1 {
        let vals = if n == 1 { alloc::vec![a[(0, 0)]] } else { Vec::new() };
        return (vals, v);
    }

    let fro = a.norm_fro().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if fp::sqrt(2.0 * off) <= 1e-15 * fro {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if fp::abs(apq) <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                // tangent of the rotation angle, smaller root
                let t = if theta >= 0.0 {
                    1.0 / (theta + fp::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + fp::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / fp::sqrt(1.0 + t * t);
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)], i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| v[(i, pairs[j].1)]);
    (vals, vecs)
}

/// Symmetric square root of a positive semidefinite matrix, clamping small
/// negative eigenvalues at zero.
pub fn sym_sqrt(m: &Matrix) -> Matrix {
    let (vals, v) = sym_eig(m);
    let n = m.rows();
    let mut s = Matrix::zeros(n, n);
    for (i, &lam) in vals.iter().enumerate() {
        s[(i, i)] = fp::sqrt(lam.max(0.0));
    }
    &(&v * &s) * &v.transpose()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eig_sym(m: &Matrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    sym_eig(m).0[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (vals, v) = sym_eig(&a);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        let recon = &(&v * &Matrix::diag(&vals)) * &v.transpose();
        assert!((&recon - &a).max_abs() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Matrix::from_rows(&[&[5.0, 2.0, 0.0], &[2.0, 4.0, 1.0], &[0.0, 1.0, 3.0]]);
        let s = sym_sqrt(&a);
        assert!((&(&s * &s) - &a).max_abs() < 1e-12);
        assert!(s.asymmetry() < 1e-12);
    }

    #[test]
    fn orthogonality_of_eigenvectors() {
        let a = Matrix::from_fn(6, 6, |i, j| 1.0 / (1.0 + (i + j) as f64));
        let (_, v) = sym_eig(&a);
        let g = &v.transpose() * &v;
        assert!((&g - &Matrix::identity(6)).max_abs() < 1e-12);
    }
}
