//! Error-bounded optimal stationary synchronization.
//!
//! The tracking weight `Q` is itself the design variable: we search for a
//! `Q ≻ 0` whose optimal stationary controller satisfies per-output error
//! bounds over the whole normalized initial set, while spending as little
//! stationary input energy `trace(ΓᵀRΓ)` as possible. With `Q` fixed the
//! constraint set is an LMI feasibility problem (the bilinear term is
//! frozen); the outer loop linearizes around the current operating point and
//! takes trust-region steps, growing the region after accepted steps and
//! shrinking it after rejected ones.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::conic::{AffineMat, ConicError, SdpOptions, SdpProblem, SdpStatus};
use crate::exocore::Exosystem;
use crate::matkit::{lu_solve_many, Matrix};
use crate::model::AgentModel;
use crate::oss::{build_hamiltonian, solve_oss, OssError};

#[derive(Debug, Clone, PartialEq)]
pub enum EbossError {
    /// The path-following loop was started at an infeasible `Q⁰`.
    InfeasibleInitialPoint,
    /// No feasible diagonal weight below the search cap.
    NoFeasibleQ,
    /// The linearized step problem is infeasible (trust region collapsed).
    StalledStep,
    Oss(OssError),
    Conic(ConicError),
}

impl fmt::Display for EbossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EbossError::InfeasibleInitialPoint => write!(f, "initial weight is infeasible for the requested bounds"),
            EbossError::NoFeasibleQ => write!(f, "no feasible diagonal weight found below the search cap"),
            EbossError::StalledStep => write!(f, "linearized step problem infeasible"),
            EbossError::Oss(e) => write!(f, "{e}"),
            EbossError::Conic(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EbossError {}

impl From<OssError> for EbossError {
    fn from(e: OssError) -> Self {
        EbossError::Oss(e)
    }
}

impl From<ConicError> for EbossError {
    fn from(e: ConicError) -> Self {
        EbossError::Conic(e)
    }
}

/// Synthesis instance: an agent, the exosystem, the input weight and the
/// tolerated per-output stationary errors.
#[derive(Clone)]
pub struct EbossSpec<'a> {
    pub agent: &'a AgentModel,
    pub exo: &'a Exosystem,
    pub r: Matrix,
    pub epsilon: Vec<f64>,
    pub options: EbossOptions,
}

#[derive(Debug, Clone, Copy)]
pub struct EbossOptions {
    /// Strictness margin replacing the open constraints (`≻ 0` becomes
    /// `⪰ δI`).
    pub margin: f64,
    pub sdp: SdpOptions,
}

impl Default for EbossOptions {
    fn default() -> Self {
        EbossOptions { margin: 1e-8, sdp: SdpOptions::default() }
    }
}

impl<'a> EbossSpec<'a> {
    pub fn new(agent: &'a AgentModel, exo: &'a Exosystem, r: Matrix, epsilon: Vec<f64>) -> Self {
        assert_eq!(epsilon.len(), exo.output_count());
        assert!(epsilon.iter().all(|e| *e > 0.0));
        EbossSpec { agent, exo, r, epsilon, options: EbossOptions::default() }
    }
}

/// Outcome of evaluating the fixed-`Q` design: the stationary pair is pinned
/// by the Sylvester solve, the remaining feasibility problem over the
/// invariant-ellipsoid coefficients and the bound slack is an SDP.
#[derive(Debug, Clone)]
pub struct Op2Eval {
    pub feasible: bool,
    pub pi: Matrix,
    pub gamma: Matrix,
    pub pi_lambda: Matrix,
    /// trace(ΓᵀRΓ) at this Q.
    pub objective: f64,
    /// Invariant-ellipsoid certificate (when feasible).
    pub p: Option<Matrix>,
    /// Bound slack certificate (when feasible).
    pub x: Option<Matrix>,
}

fn p_quadratic_on_boundary(basis: &[Matrix], xb: &[f64]) -> Vec<f64> {
    basis
        .iter()
        .map(|b| {
            let bx = b.matvec(xb);
            bx.iter().zip(xb.iter()).map(|(a, c)| a * c).sum()
        })
        .collect()
}

/// Evaluate the design at a fixed weight `Q`.
pub fn evaluate_op2_at_q(spec: &EbossSpec<'_>, q: &Matrix) -> Result<Op2Eval, EbossError> {
    let sol = solve_oss(spec.agent, spec.exo, q, &spec.r)?;
    let objective = (&(&sol.gamma.transpose() * &spec.r) * &sol.gamma).trace();
    let err = &(&spec.agent.c * &sol.pi) - spec.exo.cbar();

    let basis = spec.exo.ellipsoid_basis();
    let nb = basis.len();
    let p = spec.exo.output_count();
    let delta = spec.options.margin;

    let mut sdp = SdpProblem::new();
    let p_start = sdp.add_vars(nb);
    let x_start = sdp.add_vars(p * (p + 1) / 2);
    let p_aff = AffineMat::from_basis(&basis, p_start);
    let x_aff = AffineMat::from_sym_vars(p, x_start);

    for k in 0..nb {
        sdp.add_scalar_ineq(-delta, &[(p_start + k, 1.0)]);
    }
    let quad = p_quadratic_on_boundary(&basis, spec.exo.boundary_vector());
    sdp.add_scalar_ineq(1.0, &quad.iter().enumerate().map(|(k, &c)| (p_start + k, -c)).collect::<Vec<_>>());
    sdp.add_affine_block(&x_aff, delta);
    let mut xk = x_start;
    for j in 0..p {
        sdp.add_scalar_ineq(spec.epsilon[j] * spec.epsilon[j], &[(xk, -1.0)]);
        xk += (p - j).max(1);
    }
    let coupling = AffineMat::block2x2_sym(&p_aff, &AffineMat::constant(err.clone()), &x_aff);
    sdp.add_affine_block(&coupling, delta);

    let fsol = sdp.feasibility(&spec.options.sdp)?;
    let feasible = fsol.status == SdpStatus::Optimal && fsol.phase1_slack.unwrap_or(f64::INFINITY) <= spec.options.sdp.feas_tol;

    let (p_mat, x_mat) = if feasible {
        let mut pm = Matrix::zeros(spec.exo.order(), spec.exo.order());
        for (k, b) in basis.iter().enumerate() {
            pm = &pm + &b.scale(fsol.v[p_start + k]);
        }
        (Some(pm), Some(AffineMat::from_sym_vars(p, 0).eval(&fsol.v[x_start..])))
    } else {
        (None, None)
    };

    Ok(Op2Eval { feasible, pi: sol.pi, gamma: sol.gamma, pi_lambda: sol.pi_lambda, objective, p: p_mat, x: x_mat })
}

/// Reassemble the per-output bound LMI
/// `[[P, (CΠ−C̄)ᵀe_j], [e_jᵀ(CΠ−C̄), ε_j²]]` for certificate checking.
pub fn bound_certificate(p: &Matrix, err: &Matrix, eps_j: f64, j: usize) -> Matrix {
    let n = p.rows();
    let mut m = Matrix::zeros(n + 1, n + 1);
    m.set_block(0, 0, p);
    for i in 0..n {
        m[(i, n)] = err[(j, i)];
        m[(n, i)] = err[(j, i)];
    }
    m[(n, n)] = eps_j * eps_j;
    m
}

/// One linearized trust-region step around the operating point
/// `(Q_prev, Π_prev)`: minimize the trace-slack objective over
/// (Π, Γ, Π_λ, ΔQ, P, X, Z) subject to the first-order stationarity
/// equality, the bound LMIs and the trust-region constraint
/// `[[α Q_prev, ΔQ], [ΔQ, α Q_prev]] ≻ 0`.
pub fn op3_step(spec: &EbossSpec<'_>, q_prev: &Matrix, pi_prev: &Matrix, alpha: f64) -> Result<Matrix, EbossError> {
    let agent = spec.agent;
    let exo = spec.exo;
    let (n, m, p) = (agent.state_count(), agent.input_count(), agent.output_count());
    let nbar = exo.order();
    let delta = spec.options.margin;

    let theta_prev = build_hamiltonian(agent, q_prev, &spec.r)?;
    let err_prev = &(&agent.c * pi_prev) - exo.cbar();
    let r_inv = spec.r.inverse().map_err(OssError::Mat)?;
    let r_inv_bt = lu_solve_many(&spec.r, &agent.b.transpose()).map_err(OssError::Mat)?;
    let basis = exo.ellipsoid_basis();
    let nb = basis.len();

    let mut sdp = SdpProblem::new();
    let pi_start = sdp.add_vars(n * nbar);
    let pil_start = sdp.add_vars(n * nbar);
    let g_start = sdp.add_vars(m * nbar);
    let dq_start = sdp.add_vars(p * (p + 1) / 2);
    let p_start = sdp.add_vars(nb);
    let x_start = sdp.add_vars(p * (p + 1) / 2);

    let pi_var = |i: usize, j: usize| pi_start + j * n + i;
    let pil_var = |i: usize, j: usize| pil_start + j * n + i;
    let g_var = |i: usize, j: usize| g_start + j * m + i;
    // upper-triangle index of symmetric p×p entries
    let dq_var = |a: usize, b: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        dq_start + a * p - a * (a + 1) / 2 + b
    };

    // linearized stationarity: [Π;Πλ]Ā − Θ_prev[Π;Πλ] + [0; CᵀΔQ(CΠ_prev−C̄)] = [0; CᵀQ_prev C̄]
    let rhs_bottom = &(&agent.c.transpose() * q_prev) * exo.cbar();
    let abar = exo.abar();
    let y_var = |i: usize, j: usize| if i < n { pi_var(i, j) } else { pil_var(i - n, j) };
    for r in 0..2 * n {
        for j in 0..nbar {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for s in 0..nbar {
                if abar[(s, j)] != 0.0 {
                    terms.push((y_var(r, s), abar[(s, j)]));
                }
            }
            for s in 0..2 * n {
                if theta_prev[(r, s)] != 0.0 {
                    terms.push((y_var(s, j), -theta_prev[(r, s)]));
                }
            }
            let mut rhs = 0.0;
            if r >= n {
                let rr = r - n;
                for a in 0..p {
                    for b in 0..p {
                        let coeff = agent.c[(a, rr)] * err_prev[(b, j)];
                        if coeff != 0.0 {
                            terms.push((dq_var(a, b), coeff));
                        }
                    }
                }
                rhs = rhs_bottom[(rr, j)];
            }
            sdp.add_equality(terms, rhs);
        }
    }

    // Γ = −R⁻¹BᵀΠλ
    for i in 0..m {
        for j in 0..nbar {
            let mut terms = vec![(g_var(i, j), 1.0)];
            for s in 0..n {
                if r_inv_bt[(i, s)] != 0.0 {
                    terms.push((pil_var(s, j), r_inv_bt[(i, s)]));
                }
            }
            sdp.add_equality(terms, 0.0);
        }
    }

    let p_aff = AffineMat::from_basis(&basis, p_start);
    let x_aff = AffineMat::from_sym_vars(p, x_start);
    let dq_aff = AffineMat::from_sym_vars(p, dq_start);
    let pi_aff = AffineMat::from_matrix_vars(n, nbar, |i, j| pi_var(i, j));
    let gamma_aff = AffineMat::from_matrix_vars(m, nbar, |i, j| g_var(i, j));

    for k in 0..nb {
        sdp.add_scalar_ineq(-delta, &[(p_start + k, 1.0)]);
    }
    let quad = p_quadratic_on_boundary(&basis, exo.boundary_vector());
    sdp.add_scalar_ineq(1.0, &quad.iter().enumerate().map(|(k, &c)| (p_start + k, -c)).collect::<Vec<_>>());
    sdp.add_affine_block(&x_aff, delta);
    let mut xk = x_start;
    for j in 0..p {
        sdp.add_scalar_ineq(spec.epsilon[j] * spec.epsilon[j], &[(xk, -1.0)]);
        xk += (p - j).max(1);
    }
    let err_aff = pi_aff.left_mul(&agent.c).sub_const(exo.cbar());
    let coupling = AffineMat::block2x2_sym(&p_aff, &err_aff, &x_aff);
    sdp.add_affine_block(&coupling, delta);

    // trust region and positivity of the stepped weight
    let tr = AffineMat::block2x2_sym(
        &AffineMat::constant(q_prev.scale(alpha)),
        &dq_aff,
        &AffineMat::constant(q_prev.scale(alpha)),
    );
    sdp.add_affine_block(&tr, delta);
    let stepped = dq_aff.add(&AffineMat::constant(q_prev.clone()));
    sdp.add_affine_block(&stepped, delta);

    sdp.add_trace_slack(&gamma_aff, &r_inv);

    let sol = sdp.solve(&spec.options.sdp)?;
    if sol.status == SdpStatus::Infeasible {
        return Err(EbossError::StalledStep);
    }
    let mut dq = Matrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            dq[(a, b)] = sol.v[dq_var(a, b)];
            dq[(b, a)] = dq[(a, b)];
        }
    }
    Ok(dq)
}

/// One row of the path-following log.
#[derive(Debug, Clone)]
pub struct OperatingPoint {
    pub k: usize,
    pub q: Matrix,
    pub objective: f64,
    /// Trust-region scalar used for this step.
    pub alpha: f64,
    pub delta_rel: f64,
    pub accepted: bool,
    pub dq_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    DeltaRelBelowThreshold,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct PathHistory {
    pub points: Vec<OperatingPoint>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy)]
pub struct PathOptions {
    pub delta_rel_min: f64,
    pub k_max: usize,
    /// Trust-region growth factor after an accepted step.
    pub gamma: f64,
    /// Trust-region shrink factor after a rejected step.
    pub delta: f64,
    pub alpha_max: f64,
    pub alpha0: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { delta_rel_min: 1e-7, k_max: 300, gamma: 1.5, delta: 0.9, alpha_max: f64::INFINITY, alpha0: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub q: Matrix,
    pub pi: Matrix,
    pub gamma: Matrix,
    pub objective: f64,
    pub p: Matrix,
    pub x: Matrix,
    pub history: PathHistory,
}

fn try_op2(spec: &EbossSpec<'_>, q: &Matrix) -> Result<Option<Op2Eval>, EbossError> {
    match evaluate_op2_at_q(spec, q) {
        Ok(ev) => Ok(Some(ev)),
        // a candidate weight can push the Hamiltonian onto the imaginary
        // axis; that is a rejected step, not a hard failure
        Err(EbossError::Oss(OssError::ImaginaryAxisHamiltonian)) => Ok(None),
        Err(EbossError::Oss(OssError::Mat(crate::matkit::MatError::SpectraOverlap { .. }))) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Trust-region path-following over the tracking weight.
pub fn path_following(spec: &EbossSpec<'_>, q0: &Matrix, opts: &PathOptions) -> Result<PathResult, EbossError> {
    let ev0 = evaluate_op2_at_q(spec, q0)?;
    if !ev0.feasible {
        return Err(EbossError::InfeasibleInitialPoint);
    }

    let mut q_cur = q0.symmetrize();
    let mut cur = ev0;
    let mut alpha = opts.alpha0;
    let mut delta_rel = opts.delta_rel_min;
    let mut points = vec![OperatingPoint {
        k: 0,
        q: q_cur.clone(),
        objective: cur.objective,
        alpha,
        delta_rel,
        accepted: true,
        dq_norm: 0.0,
    }];

    let mut k = 1;
    let termination = loop {
        if k > opts.k_max {
            break Termination::MaxIterations;
        }
        if delta_rel < opts.delta_rel_min {
            break Termination::DeltaRelBelowThreshold;
        }

        let alpha_used = alpha;
        let dq = match op3_step(spec, &q_cur, &cur.pi, alpha_used) {
            Ok(dq) => dq,
            Err(EbossError::StalledStep) => Matrix::zeros(q_cur.rows(), q_cur.cols()),
            Err(e) => return Err(e),
        };
        let q_cand = (&q_cur + &dq).symmetrize();
        let cand = try_op2(spec, &q_cand)?;

        let (accepted, delta_rel_k) = match &cand {
            Some(ev) if ev.feasible => {
                let d = 1.0 - ev.objective / cur.objective;
                (d > 0.0, d)
            }
            _ => (false, 0.0),
        };

        if accepted {
            q_cur = q_cand;
            cur = cand.unwrap();
            delta_rel = delta_rel_k;
            alpha = (opts.gamma * alpha).min(opts.alpha_max);
        } else {
            // operating point carried over unchanged, trust region shrunk
            alpha *= opts.delta;
        }
        points.push(OperatingPoint {
            k,
            q: q_cur.clone(),
            objective: cur.objective,
            alpha: alpha_used,
            delta_rel,
            accepted,
            dq_norm: dq.norm_two(),
        });
        k += 1;
    };

    Ok(PathResult {
        q: q_cur,
        pi: cur.pi,
        gamma: cur.gamma,
        objective: cur.objective,
        p: cur.p.expect("accepted operating point carries a certificate"),
        x: cur.x.expect("accepted operating point carries a certificate"),
        history: PathHistory { points, termination },
    })
}

/// Search for a feasible diagonal starting weight: `q·I` with `q` doubling
/// from one, then one coordinate-descent pass shrinking each diagonal entry
/// by 0.8 while feasibility holds.
pub fn find_initial_q(spec: &EbossSpec<'_>) -> Result<(Matrix, Op2Eval), EbossError> {
    let p = spec.exo.output_count();
    let mut q_scalar = 1.0;
    let mut best: Option<(Matrix, Op2Eval)> = None;
    while q_scalar <= 1e12 {
        let q = Matrix::identity(p).scale(q_scalar);
        if let Some(ev) = try_op2(spec, &q)? {
            if ev.feasible {
                best = Some((q, ev));
                break;
            }
        }
        q_scalar *= 2.0;
    }
    let (mut q, mut ev) = best.ok_or(EbossError::NoFeasibleQ)?;

    for i in 0..p {
        for _ in 0..200 {
            let mut trial = q.clone();
            trial[(i, i)] *= 0.8;
            if trial[(i, i)] < 1e-6 {
                break;
            }
            match try_op2(spec, &trial)? {
                Some(tv) if tv.feasible => {
                    q = trial;
                    ev = tv;
                }
                _ => break,
            }
        }
    }
    Ok((q, ev))
}

/// Geometric bound-shrinking: with the error-bound direction `l` fixed,
/// probe `ε = l·β` on the grid `β₀·factorᵏ` and return the smallest feasible
/// `β` with its diagonal starting design. Returns `β₀`'s design unchanged
/// when the very first shrink is already infeasible.
pub fn epsilon_search(
    agent: &AgentModel,
    exo: &Exosystem,
    r: &Matrix,
    l: &[f64],
    beta0: f64,
    factor: f64,
    options: &EbossOptions,
) -> Result<(f64, Matrix, Op2Eval), EbossError> {
    assert!(factor > 0.0 && factor < 1.0);
    assert!(l.iter().all(|v| *v > 0.0));
    let probe = |beta: f64| -> Result<Option<(Matrix, Op2Eval)>, EbossError> {
        let eps: Vec<f64> = l.iter().map(|v| v * beta).collect();
        let mut spec = EbossSpec::new(agent, exo, r.clone(), eps);
        spec.options = *options;
        match find_initial_q(&spec) {
            Ok(found) => Ok(Some(found)),
            Err(EbossError::NoFeasibleQ) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let (mut q, mut ev) = match probe(beta0)? {
        Some(found) => found,
        None => return Err(EbossError::InfeasibleInitialPoint),
    };
    let mut beta = beta0;
    for _ in 0..200 {
        let next = beta * factor;
        match probe(next)? {
            Some((nq, nev)) => {
                beta = next;
                q = nq;
                ev = nev;
            }
            None => break,
        }
    }
    Ok((beta, q, ev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exocore::build_exosystem;

    fn harmonic_exo() -> Exosystem {
        build_exosystem(
            &[(0.0, 1), (1.0, 1)],
            &Matrix::from_rows(&[&[1.0, 0.5, 0.0], &[0.4, 0.0, 0.8]]),
            &[1.0, 1.0],
        )
        .unwrap()
    }

    fn capable_agent() -> AgentModel {
        // square, stable, EXS-capable
        AgentModel::new(
            Matrix::from_rows(&[&[-1.0, 0.4], &[0.1, -2.0]]),
            Matrix::from_rows(&[&[1.0, 0.0], &[0.3, 1.0]]),
            Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
        )
    }

    fn underactuated_agent() -> AgentModel {
        // one input, two independent output targets
        AgentModel::new(
            Matrix::from_rows(&[&[-1.0, 0.0], &[0.0, -2.0]]),
            Matrix::from_rows(&[&[1.0], &[0.5]]),
            Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
        )
    }

    #[test]
    fn op2_feasible_with_huge_bounds() {
        let exo = harmonic_exo();
        let agent = capable_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(2), vec![1e3, 1e3]);
        let ev = evaluate_op2_at_q(&spec, &Matrix::identity(2)).unwrap();
        assert!(ev.feasible);
        let p = ev.p.unwrap();
        // certificate: x̄_Bᵀ P x̄_B ≤ 1 and P ≻ 0
        let xb = exo.boundary_vector();
        let q: f64 = p.matvec(xb).iter().zip(xb.iter()).map(|(a, b)| a * b).sum();
        assert!(q <= 1.0 + 1e-7);
        assert!(crate::matkit::sym_eig(&p).0[0] > 0.0);
    }

    #[test]
    fn op2_infeasible_for_tiny_bounds_on_underactuated() {
        let exo = harmonic_exo();
        let agent = underactuated_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(1), vec![0.05, 0.05]);
        // coarse grid probe over diagonal weights
        for &qv in &[1.0, 1e2, 1e4, 1e6, 1e8] {
            let ev = evaluate_op2_at_q(&spec, &Matrix::identity(2).scale(qv)).unwrap();
            assert!(!ev.feasible, "q={qv} unexpectedly feasible");
        }
    }

    #[test]
    fn op2_certificates_satisfy_bound_lmi() {
        let exo = harmonic_exo();
        let agent = capable_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(2), vec![0.8, 0.9]);
        let (q, ev) = find_initial_q(&spec).unwrap();
        assert!(ev.feasible);
        let err = &(&agent.c * &ev.pi) - exo.cbar();
        let p = ev.p.as_ref().unwrap();
        for j in 0..2 {
            let cert = bound_certificate(p, &err, spec.epsilon[j], j);
            let min_eig = crate::matkit::sym_eig(&cert).0[0];
            assert!(min_eig >= -1e-8, "output {j}: certificate eigenvalue {min_eig}");
        }
        // the worst-case stationary error honours the bounds
        let sup = crate::oss::stationary_error_bound(&err, &exo);
        for j in 0..2 {
            assert!(sup[j] <= spec.epsilon[j] + 1e-7, "sup {} > eps {}", sup[j], spec.epsilon[j]);
        }
        assert!(q[(0, 0)] > 0.0);
    }

    #[test]
    fn op3_trust_region_collapse_forces_zero_step() {
        let exo = harmonic_exo();
        let agent = capable_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(2), vec![0.8, 0.9]);
        let (q, ev) = find_initial_q(&spec).unwrap();
        let dq_small = op3_step(&spec, &q, &ev.pi, 1e-6).unwrap();
        let dq_large = op3_step(&spec, &q, &ev.pi, 0.2).unwrap();
        assert!(dq_small.norm_two() <= 1e-6 * q.norm_two() + 1e-9);
        assert!(dq_small.norm_two() <= dq_large.norm_two() + 1e-9);
        // trust-region soundness
        assert!(dq_large.norm_two() < 0.2 * q.norm_two() + 1e-9);
    }

    #[test]
    fn path_following_monotone_and_terminates() {
        let exo = harmonic_exo();
        let agent = underactuated_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(1), vec![0.8, 1.2]);
        let (q0, _) = find_initial_q(&spec).unwrap();
        let opts = PathOptions { k_max: 60, ..PathOptions::default() };
        let res = path_following(&spec, &q0, &opts).unwrap();

        // accepted objectives strictly decreasing
        let mut last = f64::INFINITY;
        for pt in res.history.points.iter().filter(|p| p.accepted) {
            assert!(pt.objective < last);
            last = pt.objective;
        }
        assert!(res.objective <= res.history.points[0].objective + 1e-12);
        // final design still honours the bounds
        let err = &(&agent.c * &res.pi) - exo.cbar();
        let sup = crate::oss::stationary_error_bound(&err, &exo);
        assert!(sup[0] <= 0.8 + 1e-6 && sup[1] <= 1.2 + 1e-6);
    }

    #[test]
    fn infeasible_initial_point_rejected() {
        let exo = harmonic_exo();
        let agent = underactuated_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(1), vec![0.05, 0.05]);
        let err = path_following(&spec, &Matrix::identity(2), &PathOptions::default()).unwrap_err();
        assert_eq!(err, EbossError::InfeasibleInitialPoint);
    }

    #[test]
    fn no_feasible_q_for_impossible_bounds() {
        let exo = harmonic_exo();
        let agent = underactuated_agent();
        let spec = EbossSpec::new(&agent, &exo, Matrix::identity(1), vec![0.05, 0.05]);
        assert_eq!(find_initial_q(&spec).unwrap_err(), EbossError::NoFeasibleQ);
    }

    #[test]
    fn epsilon_search_scale_covariance() {
        let exo = harmonic_exo();
        let agent = underactuated_agent();
        let r = Matrix::identity(1);
        let opts = EbossOptions::default();
        let l1 = [1.0, 1.5];
        let l2 = [2.0, 3.0];
        let (b1, _, _) = epsilon_search(&agent, &exo, &r, &l1, 2.0, 0.9, &opts).unwrap();
        let (b2, _, _) = epsilon_search(&agent, &exo, &r, &l2, 1.0, 0.9, &opts).unwrap();
        // identical ε grids: the returned products l·β coincide
        assert!((b1 * l1[0] - b2 * l2[0]).abs() < 1e-12);
        assert!((2.0 * b2 - b1).abs() < 1e-12);
    }
}
