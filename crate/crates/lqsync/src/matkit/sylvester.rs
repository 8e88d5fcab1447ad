//! Sylvester equation `F X − X G = H` by Kronecker vectorization.
//!
//! Every instance in this crate has at most a few dozen unknowns, so the
//! dense O((nm)³) solve is the simplest correct choice.

use super::{eig, lu_solve, Matrix};
use super::MatError;

/// Solve `F X − X G = H` for `X`.
///
/// Requires σ(F) ∩ σ(G) = ∅; the nearest eigenvalue pair is reported when
/// the spectra touch (pairwise distance below 1e-9).
pub fn solve_sylvester(f: &Matrix, g: &Matrix, h: &Matrix) -> Result<Matrix, MatError> {
    assert!(f.is_square() && g.is_square());
    let (n, m) = (f.rows(), g.rows());
    if h.rows() != n || h.cols() != m {
        return Err(MatError::DimensionMismatch { expected: (n, m), got: (h.rows(), h.cols()) });
    }

    let sf = eig(f)?;
    let sg = eig(g)?;
    let (gap, fe, ge) = sf.min_distance(&sg);
    if gap <= 1e-9 {
        return Err(MatError::SpectraOverlap { f_eig: (fe.re, fe.im), g_eig: (ge.re, ge.im), gap });
    }

    // vec(F X) − vec(X G) = (I_m ⊗ F − Gᵀ ⊗ I_n) vec(X)
    let op = &Matrix::identity(m).kron(f) - &g.transpose().kron(&Matrix::identity(n));
    let x = lu_solve(&op, &h.vec_col())?;
    Ok(Matrix::from_vec_col(n, m, &x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(f: &Matrix, g: &Matrix, h: &Matrix, x: &Matrix) -> f64 {
        (&(&(f * x) - &(x * g)) - h).max_abs()
    }

    #[test]
    fn scalar_instance() {
        let x = solve_sylvester(&Matrix::diag(&[2.0]), &Matrix::diag(&[0.0]), &Matrix::diag(&[4.0])).unwrap();
        assert!((x[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_rhs_forces_zero_solution() {
        let f = Matrix::from_rows(&[&[-1.0, 0.3], &[0.0, -2.0]]);
        let g = Matrix::from_rows(&[&[1.0, 0.0], &[0.5, 3.0]]);
        let x = solve_sylvester(&f, &g, &Matrix::zeros(2, 2)).unwrap();
        assert!(x.max_abs() < 1e-14);
    }

    #[test]
    fn random_rectangular_instance_matches_oracle() {
        let f = Matrix::from_rows(&[&[-1.0, 2.0, 0.3], &[0.1, -3.0, 1.0], &[0.0, 0.7, -0.5]]);
        let g = Matrix::from_rows(&[&[2.0, 1.0], &[-0.4, 4.0]]);
        let h = Matrix::from_rows(&[&[1.0, -2.0], &[0.5, 0.0], &[3.0, 1.5]]);
        let x = solve_sylvester(&f, &g, &h).unwrap();
        assert!(residual(&f, &g, &h, &x) <= 1e-9 * (1.0 + h.max_abs()));

        // independent oracle: assemble the Kronecker system here and solve it
        let op = &Matrix::identity(2).kron(&f) - &g.transpose().kron(&Matrix::identity(3));
        let xe = super::super::lu_solve(&op, &h.vec_col()).unwrap();
        let oracle = Matrix::from_vec_col(3, 2, &xe);
        assert!((&x - &oracle).max_abs() < 1e-12);
    }

    #[test]
    fn overlap_is_rejected_with_nearest_pair() {
        let f = Matrix::diag(&[1.0, -2.0]);
        let g = Matrix::diag(&[5.0, 1.0 + 1e-12]);
        match solve_sylvester(&f, &g, &Matrix::zeros(2, 2)) {
            Err(MatError::SpectraOverlap { f_eig, g_eig, gap }) => {
                assert!((f_eig.0 - 1.0).abs() < 1e-9);
                assert!((g_eig.0 - 1.0).abs() < 1e-9);
                assert!(gap < 1e-9);
            }
            other => panic!("expected SpectraOverlap, got {other:?}"),
        }
    }

    #[test]
    fn solutions_are_unique() {
        let f = Matrix::from_rows(&[&[-2.0, 1.0], &[0.0, -1.0]]);
        let g = Matrix::from_rows(&[&[1.0, 0.2], &[0.0, 2.0]]);
        let h = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, -1.0]]);
        let x1 = solve_sylvester(&f, &g, &h).unwrap();
        let x2 = solve_sylvester(&f, &g, &h).unwrap();
        assert!((&x1 - &x2).max_abs() <= 1e-12);
    }
}
