//! Primal-dual path-following interior-point core.
//!
//! The reduced LMI problem `min cᵀw, F₀ + Σ w_k F_k ⪰ 0` is treated as the
//! dual of the standard pair
//!
//! ```text
//! (P) min ⟨C,X⟩  s.t. ⟨A_k,X⟩ = b_k, X ⪰ 0      (A_k = −F_k, C = F₀, b = −c)
//! (D) max bᵀy    s.t. Σ y_k A_k + S = C, S ⪰ 0   (y = w, S = F(w))
//! ```
//!
//! Each iteration computes the Nesterov–Todd scaling point per block,
//! assembles the (symmetric positive definite) Schur complement, and takes a
//! Mehrotra predictor-corrector step from an infeasible cold start.

use alloc::vec;
use alloc::vec::Vec;

use super::{ConicError, SdpOptions, SdpStatus};
use crate::fp;
use crate::matkit::{sym_eig, Cholesky, Matrix};

pub(super) struct IpmOutput {
    pub w: Vec<f64>,
    pub status: SdpStatus,
    pub gap: f64,
    pub iterations: usize,
    pub dual_blocks: Vec<Matrix>,
    /// `cᵀw` after every iteration (the dual objective of the standard pair).
    pub objective_trace: Vec<f64>,
}

struct Scaling {
    r: Matrix,
    r_inv: Matrix,
    /// Diagonal of the scaled point Λ (eigenvalues of R⁻¹XR⁻ᵀ = RᵀSR).
    lambda: Vec<f64>,
}

fn nt_scaling(x: &Matrix, s: &Matrix) -> Result<Scaling, ConicError> {
    let lx = Cholesky::new(x).map_err(|_| ConicError::NumericalBreakdown("iterate left the cone"))?;
    Cholesky::new(s).map_err(|_| ConicError::NumericalBreakdown("dual iterate left the cone"))?;
    let mid = (&(&lx.factor().transpose() * s) * lx.factor()).symmetrize();
    let (d2, v) = sym_eig(&mid);
    if d2.iter().any(|&e| e <= 0.0) {
        return Err(ConicError::NumericalBreakdown("NT scaling eigenvalues"));
    }
    let n = x.rows();
    // R = L_x V Σ^{-1/2}, R⁻¹ = Σ^{1/2} Vᵀ L_x⁻¹ with Σ = diag(√d2)
    let mut v_scaled = v.clone();
    for j in 0..n {
        let f = 1.0 / fp::sqrt(fp::sqrt(d2[j]));
        for i in 0..n {
            v_scaled[(i, j)] *= f;
        }
    }
    let r = lx.factor() * &v_scaled;
    let lx_inv = lx.inv_times(&Matrix::identity(n));
    let mut vt_scaled = v.transpose();
    for i in 0..n {
        let f = fp::sqrt(fp::sqrt(d2[i]));
        for j in 0..n {
            vt_scaled[(i, j)] *= f;
        }
    }
    let r_inv = &vt_scaled * &lx_inv;
    let lambda = d2.iter().map(|&e| fp::sqrt(e)).collect();
    Ok(Scaling { r, r_inv, lambda })
}

/// Largest α with `X + α·D ⪰ 0`, through the eigenvalues of L⁻¹DL⁻ᵀ.
fn step_to_boundary(x: &Matrix, d: &Matrix) -> f64 {
    let lx = match Cholesky::new(x) {
        Ok(c) => c,
        Err(_) => return 0.0,
    };
    let z = lx.inv_times(d);
    let y = lx.inv_times(&z.transpose()).transpose().symmetrize();
    let lam_min = sym_eig(&y).0[0];
    if lam_min >= -1e-14 {
        f64::INFINITY
    } else {
        -1.0 / lam_min
    }
}

/// Solve the Lyapunov-diagonal system H(Λ M) = D for symmetric D.
fn lyap_diag(lambda: &[f64], d: &Matrix) -> Matrix {
    Matrix::from_fn(d.rows(), d.cols(), |i, j| 2.0 * d[(i, j)] / (lambda[i] + lambda[j]))
}

pub(super) fn minimize(
    c: &[f64],
    f0s: &[Matrix],
    fks: &[Vec<Matrix>],
    opts: &SdpOptions,
) -> Result<IpmOutput, ConicError> {
    let m = c.len();
    let nb = f0s.len();
    let nu: usize = f0s.iter().map(|f| f.rows()).sum();
    let b: Vec<f64> = c.iter().map(|ci| -ci).collect();
    let b_norm = fp::sqrt(b.iter().map(|x| x * x).sum::<f64>());
    let c_norm = fp::sqrt(f0s.iter().map(|f| f.norm_fro() * f.norm_fro()).sum::<f64>());

    // cold start on the central ray
    let tau = 1.0_f64.max(b_norm / (1.0 + nu as f64)).max(f0s.iter().fold(0.0, |a: f64, f| a.max(f.max_abs())));
    let mut xs: Vec<Matrix> = f0s.iter().map(|f| Matrix::identity(f.rows()).scale(tau)).collect();
    let mut ss: Vec<Matrix> = xs.clone();
    let mut y = vec![0.0; m];

    let a_mat = |bi: usize, k: usize| -> Matrix { fks[bi][k].scale(-1.0) };

    let mut last_rel_gap = f64::INFINITY;
    let mut objective_trace: Vec<f64> = Vec::new();
    for iter in 0..opts.max_iter {
        // residuals
        let mut r_p = vec![0.0; m];
        for (k, rp) in r_p.iter_mut().enumerate() {
            let mut ax = 0.0;
            for bi in 0..nb {
                ax += -fks[bi][k].dot(&xs[bi]);
            }
            *rp = b[k] - ax;
        }
        let r_d: Vec<Matrix> = (0..nb)
            .map(|bi| {
                let mut acc = &f0s[bi] - &ss[bi];
                for k in 0..m {
                    if y[k] != 0.0 {
                        acc = &acc + &fks[bi][k].scale(y[k]);
                    }
                }
                acc
            })
            .collect();

        let gap: f64 = (0..nb).map(|bi| xs[bi].dot(&ss[bi])).sum();
        let mu = gap / nu as f64;
        let pobj: f64 = (0..nb).map(|bi| f0s[bi].dot(&xs[bi])).sum();
        let dobj: f64 = b.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        objective_trace.push(-dobj);

        let rel_p = fp::sqrt(r_p.iter().map(|x| x * x).sum::<f64>()) / (1.0 + b_norm);
        let rel_d = fp::sqrt(r_d.iter().map(|rd| rd.norm_fro() * rd.norm_fro()).sum::<f64>()) / (1.0 + c_norm);
        let rel_g = gap / (1.0 + fp::abs(pobj) + fp::abs(dobj));
        last_rel_gap = rel_g;

        #[cfg(feature = "std")]
        if std::env::var("LQSYNC_IPM_TRACE").is_ok() {
            std::eprintln!("it {iter} mu {mu:.3e} rp {rel_p:.3e} rd {rel_d:.3e} rg {rel_g:.3e}");
        }
        if rel_p <= opts.tol && rel_d <= opts.tol && rel_g <= opts.tol {
            return Ok(IpmOutput { w: y, status: SdpStatus::Optimal, gap: rel_g, iterations: iter, dual_blocks: xs, objective_trace });
        }

        // NT scaling and scaled data
        let mut scalings = Vec::with_capacity(nb);
        for bi in 0..nb {
            scalings.push(nt_scaling(&xs[bi], &ss[bi])?);
        }
        let a_tilde: Vec<Vec<Matrix>> = (0..nb)
            .map(|bi| {
                let sc = &scalings[bi];
                (0..m).map(|k| (&(&sc.r.transpose() * &a_mat(bi, k)) * &sc.r).symmetrize()).collect()
            })
            .collect();
        let rd_tilde: Vec<Matrix> = (0..nb)
            .map(|bi| (&(&scalings[bi].r.transpose() * &r_d[bi]) * &scalings[bi].r).symmetrize())
            .collect();

        // Schur complement
        let mut schur = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for bi in 0..nb {
                    acc += a_tilde[bi][i].dot(&a_tilde[bi][j]);
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }
        let schur_chol = match Cholesky::new(&schur) {
            Ok(ch) => ch,
            Err(_) => {
                let reg = 1e-13 * (schur.trace() / m as f64).max(1.0);
                let mut s2 = schur.clone();
                for i in 0..m {
                    s2[(i, i)] += reg;
                }
                Cholesky::new(&s2).map_err(|_| ConicError::NumericalBreakdown("Schur complement factorization"))?
            }
        };

        let solve_direction = |m_sum: &[Matrix]| -> (Vec<f64>, Vec<Matrix>, Vec<Matrix>) {
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let mut acc = r_p[i];
                for bi in 0..nb {
                    acc -= a_tilde[bi][i].dot(&m_sum[bi]);
                    acc += a_tilde[bi][i].dot(&rd_tilde[bi]);
                }
                rhs[i] = acc;
            }
            let dy = schur_chol.solve(&rhs);
            let ds: Vec<Matrix> = (0..nb)
                .map(|bi| {
                    let mut acc = r_d[bi].clone();
                    for k in 0..m {
                        if dy[k] != 0.0 {
                            acc = &acc - &a_mat(bi, k).scale(dy[k]);
                        }
                    }
                    acc.symmetrize()
                })
                .collect();
            let dx: Vec<Matrix> = (0..nb)
                .map(|bi| {
                    let sc = &scalings[bi];
                    let ds_tilde = (&(&sc.r.transpose() * &ds[bi]) * &sc.r).symmetrize();
                    (&(&sc.r * &(&m_sum[bi] - &ds_tilde)) * &sc.r.transpose()).symmetrize()
                })
                .collect();
            (dy, ds, dx)
        };

        // predictor: drive XS toward zero
        let m_sum_aff: Vec<Matrix> = (0..nb)
            .map(|bi| {
                let lam = &scalings[bi].lambda;
                Matrix::from_fn(lam.len(), lam.len(), |i, j| if i == j { -lam[i] } else { 0.0 })
            })
            .collect();
        let (_, ds_aff, dx_aff) = solve_direction(&m_sum_aff);

        let bound = |cur: &[Matrix], dir: &[Matrix]| -> f64 {
            let mut a = f64::INFINITY;
            for bi in 0..nb {
                a = a.min(step_to_boundary(&cur[bi], &dir[bi]));
            }
            a
        };
        // a single step length for both sides keeps the primal and dual
        // residuals contracting at the same rate as the gap
        let a_aff = 1.0_f64.min(0.99 * bound(&xs, &dx_aff)).min(0.99 * bound(&ss, &ds_aff));
        let mut gap_aff = 0.0;
        for bi in 0..nb {
            let xa = &xs[bi] + &dx_aff[bi].scale(a_aff);
            let sa = &ss[bi] + &ds_aff[bi].scale(a_aff);
            gap_aff += xa.dot(&sa);
        }
        let mu_aff = (gap_aff / nu as f64).max(0.0);
        let sigma = {
            let ratio = (mu_aff / mu).clamp(0.0, 1.0);
            ratio * ratio * ratio
        };

        // corrector with the second-order term in scaled space
        let m_sum_cor: Vec<Matrix> = (0..nb)
            .map(|bi| {
                let sc = &scalings[bi];
                let dxh = (&(&sc.r_inv * &dx_aff[bi]) * &sc.r_inv.transpose()).symmetrize();
                let dsh = (&(&sc.r.transpose() * &ds_aff[bi]) * &sc.r).symmetrize();
                let cross = &dxh * &dsh;
                let n = sc.lambda.len();
                let d = Matrix::from_fn(n, n, |i, j| {
                    let second = 0.5 * (cross[(i, j)] + cross[(j, i)]);
                    let central = if i == j { sigma * mu - sc.lambda[i] * sc.lambda[i] } else { 0.0 };
                    central - second
                });
                lyap_diag(&sc.lambda, &d)
            })
            .collect();
        let (dy, ds, dx) = solve_direction(&m_sum_cor);

        let alpha = 1.0_f64.min(0.99 * bound(&xs, &dx)).min(0.99 * bound(&ss, &ds));
        if alpha < 1e-10 {
            return Ok(IpmOutput { w: y, status: SdpStatus::MaxIter, gap: rel_g, iterations: iter, dual_blocks: xs, objective_trace });
        }
        for bi in 0..nb {
            xs[bi] = (&xs[bi] + &dx[bi].scale(alpha)).symmetrize();
            ss[bi] = (&ss[bi] + &ds[bi].scale(alpha)).symmetrize();
        }
        for k in 0..m {
            y[k] += alpha * dy[k];
        }
    }

    Ok(IpmOutput {
        w: y,
        status: SdpStatus::MaxIter,
        gap: last_rel_gap,
        iterations: opts.max_iter,
        dual_blocks: xs,
        objective_trace,
    })
}
