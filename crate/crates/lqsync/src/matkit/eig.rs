//! General real eigenvalues via balancing, Householder-Hessenberg reduction
//! and the Francis double-shift QR iteration; eigenvectors by shifted inverse
//! iteration in complex arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::cmat::CMatrix;
use super::{MatError, Matrix};
use crate::fp;

/// Eigenvalues of a square matrix, with multiplicity.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Group eigenvalues into clusters of radius `tol`, returning one
    /// representative per cluster with its multiplicity.
    pub fn clustered(&self, tol: f64) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for &z in &self.values {
            match out.iter_mut().find(|(c, _)| (z - *c).norm() <= tol) {
                Some((_, m)) => *m += 1,
                None => out.push((z, 1)),
            }
        }
        out
    }

    /// Smallest distance between an eigenvalue of `self` and one of `other`.
    pub fn min_distance(&self, other: &Spectrum) -> (f64, Complex64, Complex64) {
        let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &a in &self.values {
            for &b in &other.values {
                let d = (a - b).norm();
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        best
    }
}

/// EISPACK-style balancing: diagonal similarity with powers of two, so the
/// eigenvalues are untouched bit-for-bit.
fn balance(a: &mut Matrix) {
    let n = a.rows();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += fp::abs(a[(j, i)]);
                    r += fp::abs(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / 2.0 {
                f *= 2.0;
                cc *= 4.0;
            }
            while cc > r * 2.0 {
                f /= 2.0;
                cc /= 4.0;
            }
            if (cc + r) / f < 0.95 * s {
                converged = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity, in place).
fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..(n - 2) {
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += a[(i, k)] * a[(i, k)];
        }
        if norm2 <= 1e-300 {
            continue;
        }
        let alpha = -fp::sign(fp::sqrt(norm2), a[(k + 1, k)]);
        let mut v = vec![0.0; n];
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv <= 1e-300 {
            continue;
        }
        let beta = 2.0 / vtv;
        // A ← (I − β v vᵀ) A
        for j in 0..n {
            let mut s = 0.0;
            for i in (k + 1)..n {
                s += v[i] * a[(i, j)];
            }
            s *= beta;
            for i in (k + 1)..n {
                a[(i, j)] -= s * v[i];
            }
        }
        // A ← A (I − β v vᵀ)
        for i in 0..n {
            let mut s = 0.0;
            for j in (k + 1)..n {
                s += a[(i, j)] * v[j];
            }
            s *= beta;
            for j in (k + 1)..n {
                a[(i, j)] -= s * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; returns the
/// eigenvalues. Destroys `a`.
fn hqr(a: &mut Matrix) -> Result<Vec<Complex64>, MatError> {
    let n = a.rows();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(w);
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += fp::abs(a[(i, j)]);
        }
    }
    if anorm == 0.0 {
        return Ok(w);
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a negligible subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let s0 = fp::abs(a[((l - 1) as usize, (l - 1) as usize)]) + fp::abs(a[(l as usize, l as usize)]);
                let s0 = if s0 == 0.0 { anorm } else { s0 };
                if fp::abs(a[(l as usize, (l - 1) as usize)]) <= eps * s0 {
                    a[(l as usize, (l - 1) as usize)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nn as usize, nn as usize)];
            if l == nn {
                // one real eigenvalue
                w[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[((nn - 1) as usize, (nn - 1) as usize)];
            let mut wq = a[(nn as usize, (nn - 1) as usize)] * a[((nn - 1) as usize, nn as usize)];
            if l == nn - 1 {
                // a 2x2 block: real pair or complex conjugate pair
                let p = 0.5 * (y - x);
                let q = p * p + wq;
                let z = fp::sqrt(fp::abs(q));
                x += t;
                if q >= 0.0 {
                    let z = p + fp::sign(z, p);
                    let l1 = x + z;
                    let l2 = if z != 0.0 { x - wq / z } else { l1 };
                    w[(nn - 1) as usize] = Complex64::new(l1, 0.0);
                    w[nn as usize] = Complex64::new(l2, 0.0);
                } else {
                    w[(nn - 1) as usize] = Complex64::new(x + p, z);
                    w[nn as usize] = Complex64::new(x + p, -z);
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(MatError::ConvergenceFailure("QR eigenvalue iteration"));
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    a[(i as usize, i as usize)] -= x;
                }
                let s = fp::abs(a[(nn as usize, (nn - 1) as usize)]) + fp::abs(a[((nn - 1) as usize, (nn - 2) as usize)]);
                x = 0.75 * s;
                y = x;
                wq = -0.4375 * s * s;
            }
            its += 1;

            // find two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m as usize, m as usize)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - wq) / a[((m + 1) as usize, m as usize)] + a[(m as usize, (m + 1) as usize)];
                q = a[((m + 1) as usize, (m + 1) as usize)] - z - rr - ss;
                r = a[((m + 2) as usize, (m + 1) as usize)];
                let s = fp::abs(p) + fp::abs(q) + fp::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = fp::abs(a[(m as usize, (m - 1) as usize)]) * (fp::abs(q) + fp::abs(r));
                let v = fp::abs(p)
                    * (fp::abs(a[((m - 1) as usize, (m - 1) as usize)]) + fp::abs(z) + fp::abs(a[((m + 1) as usize, (m + 1) as usize)]));
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, (i - 2) as usize)] = 0.0;
                if i != m + 2 {
                    a[(i as usize, (i - 3) as usize)] = 0.0;
                }
            }

            // double QR step on rows l..nn and columns l..nn
            for k in m..nn {
                if k != m {
                    p = a[(k as usize, (k - 1) as usize)];
                    q = a[((k + 1) as usize, (k - 1) as usize)];
                    r = if k != nn - 1 { a[((k + 2) as usize, (k - 1) as usize)] } else { 0.0 };
                    x = fp::abs(p) + fp::abs(q) + fp::abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = fp::sign(fp::sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k as usize, (k - 1) as usize)] = -a[(k as usize, (k - 1) as usize)];
                    }
                } else {
                    a[(k as usize, (k - 1) as usize)] = -s * x;
                }
                p += s;
                x = p / s;
                let yy = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in (k as usize)..=(nn as usize) {
                    let mut pp = a[(k as usize, j)] + q * a[((k + 1) as usize, j)];
                    if k != nn - 1 {
                        pp += r * a[((k + 2) as usize, j)];
                        a[((k + 2) as usize, j)] -= pp * z;
                    }
                    a[((k + 1) as usize, j)] -= pp * yy;
                    a[(k as usize, j)] -= pp * x;
                }
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in (l as usize)..=(mmin as usize) {
                    let mut pp = x * a[(i, k as usize)] + yy * a[(i, (k + 1) as usize)];
                    if k != nn - 1 {
                        pp += z * a[(i, (k + 2) as usize)];
                        a[(i, (k + 2) as usize)] -= pp * r;
                    }
                    a[(i, (k + 1) as usize)] -= pp * q;
                    a[(i, k as usize)] -= pp;
                }
            }
        }
    }
    Ok(w)
}

/// Eigenvalues of a general square real matrix, sorted by real part then
/// imaginary part for reproducibility.
pub fn eig(m: &Matrix) -> Result<Spectrum, MatError> {
    assert!(m.is_square(), "eig requires a square matrix");
    assert!(m.is_finite(), "eig requires finite entries");
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    let mut values = hqr(&mut a)?;
    values.sort_by(|x, y| {
        x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(Spectrum { values })
}

/// All eigenvalues strictly in the open left half plane, with margin 1e-9.
pub fn is_hurwitz(m: &Matrix) -> Result<bool, MatError> {
    Ok(eig(m)?.max_re() < -1e-9)
}

/// Hurwitz test for a complex matrix `Re + i·Im` through its real embedding
/// [[Re, −Im], [Im, Re]], whose spectrum is the union of the spectra of the
/// matrix and its conjugate.
pub fn is_hurwitz_complex(re: &Matrix, im: &Matrix) -> Result<bool, MatError> {
    assert!(re.is_square() && re.rows() == im.rows());
    let n = re.rows();
    let mut e = Matrix::zeros(2 * n, 2 * n);
    e.set_block(0, 0, re);
    e.set_block(0, n, &im.scale(-1.0));
    e.set_block(n, 0, im);
    e.set_block(n, n, re);
    is_hurwitz(&e)
}

/// One eigenvector of `m` for the (approximate) eigenvalue `lambda` by
/// shifted inverse iteration, orthogonalized against `previous` so repeated
/// eigenvalues yield independent vectors. The returned vector has unit norm
/// and its largest component rotated to the positive real axis.
pub fn inverse_iteration(
    m: &Matrix,
    lambda: Complex64,
    previous: &[Vec<Complex64>],
) -> Result<Vec<Complex64>, MatError> {
    let n = m.rows();
    let scale = m.max_abs().max(1.0);
    let tol = 1e-8 * (scale + lambda.norm());

    for attempt in 0..n.max(1) {
        let shift = lambda + Complex64::new(3e-12 * scale * (1.0 + attempt as f64), 1e-13 * scale);
        let sys = CMatrix::shifted(m, shift);
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.3 * ((i + attempt) % n) as f64, 0.05 * i as f64))
            .collect();
        orthogonalize(&mut x, previous);
        if norm(&x) < 1e-12 {
            continue;
        }
        normalize(&mut x);

        let mut ok = false;
        for _ in 0..8 {
            let mut z = sys.solve_clamped(&x)?;
            orthogonalize(&mut z, previous);
            let nz = norm(&z);
            if nz < 1e-280 {
                break;
            }
            for zi in z.iter_mut() {
                *zi /= nz;
            }
            x = z;
            if residual(m, lambda, &x) <= tol {
                ok = true;
                break;
            }
        }
        if ok || residual(m, lambda, &x) <= tol * 100.0 {
            fix_phase(&mut x);
            return Ok(x);
        }
    }
    Err(MatError::ConvergenceFailure("inverse iteration"))
}

fn residual(m: &Matrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let n = m.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut acc = -lambda * x[i];
        for j in 0..n {
            acc += m[(i, j)] * x[j];
        }
        worst = worst.max(acc.norm());
    }
    worst
}

fn orthogonalize(x: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let mut proj = Complex64::new(0.0, 0.0);
        for (xi, bi) in x.iter().zip(b.iter()) {
            proj += bi.conj() * *xi;
        }
        for (xi, bi) in x.iter_mut().zip(b.iter()) {
            *xi -= proj * *bi;
        }
    }
}

fn norm(x: &[Complex64]) -> f64 {
    fp::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

fn normalize(x: &mut [Complex64]) {
    let n = norm(x);
    if n > 0.0 {
        for xi in x.iter_mut() {
            *xi /= n;
        }
    }
}

fn fix_phase(x: &mut [Complex64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, z) in x.iter().enumerate() {
        if z.norm_sqr() > best {
            best = z.norm_sqr();
            idx = i;
        }
    }
    let phase = x[idx] / x[idx].norm();
    for xi in x.iter_mut() {
        *xi /= phase;
    }
}
