//! Continuous-time algebraic Riccati equation
//! `Aᵀ P + P A − P B R⁻¹ Bᵀ P + Q = 0`
//! via the stable invariant subspace of the Hamiltonian matrix, polished by
//! Newton–Kleinman iteration.

use alloc::vec::Vec;
use num_complex::Complex64;

use super::symeig::min_eig_sym;
use super::{eig, inverse_iteration, is_hurwitz, lu_solve_many, solve_sylvester, MatError, Matrix};

fn care_residual(a: &Matrix, s: &Matrix, q: &Matrix, p: &Matrix) -> f64 {
    let at_p = &a.transpose() * p;
    let p_a = p * a;
    let psp = &(p * s) * p;
    (&(&(&at_p + &p_a) - &psp) + q).max_abs()
}

/// Solve the CARE for the stabilizing solution `P ≻ 0`.
///
/// `q` must be symmetric positive semidefinite and `r` symmetric positive
/// definite. Fails with [`MatError::NotStabilizable`] when the Hamiltonian
/// has imaginary-axis eigenvalues, and [`MatError::NoStabilizingSolution`]
/// when no symmetric positive definite stabilizing solution emerges.
pub fn solve_care(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<Matrix, MatError> {
    assert!(a.is_square());
    let n = a.rows();
    assert_eq!(b.rows(), n);
    assert_eq!(q.rows(), n);
    assert_eq!(r.rows(), b.cols());

    if q.asymmetry() > 1e-10 * q.max_abs().max(1.0) || min_eig_sym(q) < -1e-10 {
        return Err(MatError::NotPositiveDefinite);
    }
    if min_eig_sym(r) <= 1e-10 {
        return Err(MatError::NotPositiveDefinite);
    }

    let r_inv_bt = lu_solve_many(r, &b.transpose())?;
    let s = (b * &r_inv_bt).symmetrize();

    // Hamiltonian [[A, -S], [-Q, -Aᵀ]]
    let mut ham = Matrix::zeros(2 * n, 2 * n);
    ham.set_block(0, 0, a);
    ham.set_block(0, n, &s.scale(-1.0));
    ham.set_block(n, 0, &q.scale(-1.0));
    ham.set_block(n, n, &a.transpose().scale(-1.0));

    let spectrum = eig(&ham)?;
    let scale = ham.max_abs().max(1.0);
    if spectrum.values().iter().any(|z| crate::fp::abs(z.re) <= 1e-9 * scale) {
        return Err(MatError::NotStabilizable);
    }

    // one representative per conjugate pair in the stable half plane;
    // near-real eigenvalues are snapped onto the real axis first so both
    // members of an almost-real pair survive the im >= 0 filter
    let stable: Vec<Complex64> = spectrum
        .values()
        .iter()
        .map(|z| if crate::fp::abs(z.im) <= 1e-9 * scale { Complex64::new(z.re, 0.0) } else { *z })
        .filter(|z| z.re < 0.0 && z.im >= 0.0)
        .collect();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cluster_vecs: Vec<(Complex64, Vec<Vec<Complex64>>)> = Vec::new();
    for lam in stable {
        let entry = match cluster_vecs.iter_mut().find(|(c, _)| (lam - *c).norm() <= 1e-6 * scale) {
            Some(e) => e,
            None => {
                cluster_vecs.push((lam, Vec::new()));
                cluster_vecs.last_mut().unwrap()
            }
        };
        let v = inverse_iteration(&ham, entry.0, &entry.1)?;
        entry.1.push(v.clone());
        if lam.im > 0.0 {
            // complex pair: its conjugate spans the other real direction
            columns.push(v.iter().map(|z| z.re).collect());
            columns.push(v.iter().map(|z| z.im).collect());
        } else {
            columns.push(v.iter().map(|z| z.re).collect());
        }
    }
    if columns.len() != n {
        return Err(MatError::NoStabilizingSolution);
    }

    let basis = Matrix::from_fn(2 * n, n, |i, j| columns[j][i]);
    let u = basis.block(0, 0, n, n);
    let v = basis.block(n, 0, n, n);
    // P = V U⁻¹, i.e. Uᵀ Pᵀ = Vᵀ
    let p0 = lu_solve_many(&u.transpose(), &v.transpose()).map_err(|_| MatError::NoStabilizingSolution)?;
    let mut p = p0.transpose().symmetrize();

    // Newton–Kleinman refinement: quadratic cleanup of the subspace estimate
    let tol = 1e-9 * (1.0 + q.max_abs());
    for _ in 0..4 {
        let a_cl = a - &(&s * &p);
        if !is_hurwitz(&a_cl)? {
            return Err(MatError::NoStabilizingSolution);
        }
        // (A−SP)ᵀ P₊ + P₊ (A−SP) = −Q − P S P
        let rhs = (&(&(&p * &s) * &p) + q).scale(-1.0);
        let refined = solve_sylvester(&a_cl.transpose(), &a_cl.scale(-1.0), &rhs)?.symmetrize();
        let done = care_residual(a, &s, q, &refined) <= tol;
        p = refined;
        if done {
            break;
        }
    }

    if care_residual(a, &s, q, &p) > tol {
        return Err(MatError::NoStabilizingSolution);
    }
    let a_cl = a - &(&s * &p);
    if !is_hurwitz(&a_cl)? {
        return Err(MatError::NoStabilizingSolution);
    }
    if min_eig_sym(&p) <= 0.0 {
        return Err(MatError::NoStabilizingSolution);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_cases() {
        // -p^2 + 1 = 0 -> p = 1; -p^2 + 4 = 0 -> p = 2
        let p = solve_care(&Matrix::diag(&[0.0]), &Matrix::diag(&[1.0]), &Matrix::diag(&[1.0]), &Matrix::diag(&[1.0])).unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-12);
        let p = solve_care(&Matrix::diag(&[0.0]), &Matrix::diag(&[1.0]), &Matrix::diag(&[4.0]), &Matrix::diag(&[1.0])).unwrap();
        assert!((p[(0, 0)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn four_state_system() {
        let a = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[-2.0, -0.3, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.5, 0.0, -1.0, -0.2],
        ]);
        let b = Matrix::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]);
        let q = Matrix::identity(4);
        let r = Matrix::identity(2);
        let p = solve_care(&a, &b, &q, &r).unwrap();

        let s = &b * &b.transpose();
        assert!(care_residual(&a, &s, &q, &p) < 1e-9 * 2.0);
        assert!(p.asymmetry() < 1e-10);
        assert!(min_eig_sym(&p) > 0.0);
        let a_cl = &a - &(&s * &p);
        assert!(is_hurwitz(&a_cl).unwrap());
    }

    #[test]
    fn repeated_hamiltonian_eigenvalues() {
        // A = 0 (2x2), B = I: Hamiltonian eigenvalues ±1 with multiplicity 2,
        // stabilizing solution P = I
        let p = solve_care(&Matrix::zeros(2, 2), &Matrix::identity(2), &Matrix::identity(2), &Matrix::identity(2)).unwrap();
        assert!((&p - &Matrix::identity(2)).max_abs() < 1e-10);
    }

    #[test]
    fn unstable_scalar_with_zero_weight() {
        // 2p - p^2 = 0: the stabilizing root is p = 2 (closed loop -1)
        let a = Matrix::diag(&[1.0]);
        let b = Matrix::diag(&[1.0]);
        let q = Matrix::zeros(1, 1);
        let r = Matrix::identity(1);
        let p = solve_care(&a, &b, &q, &r).unwrap();
        assert!((p[(0, 0)] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn uncontrollable_imaginary_mode_is_rejected() {
        // undamped oscillator with B = 0 column: not stabilizable
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let b = Matrix::zeros(2, 1);
        let err = solve_care(&a, &b, &Matrix::zeros(2, 2), &Matrix::identity(1)).unwrap_err();
        assert_eq!(err, MatError::NotStabilizable);
    }
}
