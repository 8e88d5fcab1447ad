//! Matrix exponential by Padé [13/13] approximation with scaling and
//! squaring (Higham's method).

use super::{lu_solve_many, Matrix};
use crate::fp;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// e^{M t}. Exact to round-off for the small skew/zero blocks used by the
/// exosystem; scaling-and-squaring Padé for everything else.
pub fn expm_flow(m: &Matrix, t: f64) -> Matrix {
    assert!(m.is_square());
    let n = m.rows();
    let a = m.scale(t);
    let norm = a.norm_one();
    if norm == 0.0 {
        return Matrix::identity(n);
    }

    // theta_13 for double precision
    let theta = 5.371920351148152;
    let mut s = 0;
    let mut scaled = a;
    if norm > theta {
        let mut ratio = norm / theta;
        while ratio > 1.0 {
            ratio /= 2.0;
            s += 1;
        }
        scaled = scaled.scale(fp::powi(0.5, s));
    }

    let a1 = scaled;
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let id = Matrix::identity(n);

    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let inner_u = &(&a6.scale(PADE13[13]) + &a4.scale(PADE13[11])) + &a2.scale(PADE13[9]);
    let u_poly = &(&(&(&a6 * &inner_u) + &a6.scale(PADE13[7])) + &a4.scale(PADE13[5]))
        + &(&a2.scale(PADE13[3]) + &id.scale(PADE13[1]));
    let u = &a1 * &u_poly;
    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let inner_v = &(&a6.scale(PADE13[12]) + &a4.scale(PADE13[10])) + &a2.scale(PADE13[8]);
    let v = &(&(&(&a6 * &inner_v) + &a6.scale(PADE13[6])) + &a4.scale(PADE13[4]))
        + &(&a2.scale(PADE13[2]) + &id.scale(PADE13[0]));

    // (v - u)^{-1} (v + u)
    let num = &v + &u;
    let den = &v - &u;
    let mut e = lu_solve_many(&den, &num).expect("Pade denominator is nonsingular for scaled input");
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Series oracle: scale far down, sum the Taylor series to convergence,
    /// square back up. Independent of the Padé path.
    fn expm_taylor(m: &Matrix, t: f64) -> Matrix {
        let n = m.rows();
        let mut s = 0;
        let mut a = m.scale(t);
        while a.norm_one() > 0.25 {
            a = a.scale(0.5);
            s += 1;
        }
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..40 {
            term = &term * &a;
            term = term.scale(1.0 / k as f64);
            sum = &sum + &term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = expm_flow(&Matrix::zeros(3, 3), 2.0);
        assert!((&e - &Matrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn planar_rotation() {
        // J = [[0,1],[-1,0]], e^{J t} = [[cos t, sin t],[-sin t, cos t]]
        let j = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let t = core::f64::consts::FRAC_PI_2;
        let e = expm_flow(&j, t);
        let expect = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!((&e - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn matches_taylor_oracle() {
        let m = Matrix::from_rows(&[
            &[0.3, -1.2, 0.7, 0.1],
            &[2.0, 0.0, -0.3, 0.5],
            &[-0.4, 0.9, -1.5, 2.2],
            &[1.1, -0.6, 0.2, 0.8],
        ]);
        for &t in &[0.1, 1.0, 3.7] {
            let e = expm_flow(&m, t);
            let o = expm_taylor(&m, t);
            let rel = (&e - &o).max_abs() / o.max_abs();
            assert!(rel < 1e-12, "t={t} rel={rel}");
        }
    }

    #[test]
    fn semigroup_property() {
        let m = Matrix::from_rows(&[&[0.0, 2.0, -1.0], &[-2.0, 0.0, 0.4], &[1.0, -0.4, 0.0]]);
        let (s, t) = (0.7, 1.9);
        let lhs = expm_flow(&m, s + t);
        let rhs = &expm_flow(&m, s) * &expm_flow(&m, t);
        assert!((&lhs - &rhs).max_abs() < 1e-9);
    }
}
