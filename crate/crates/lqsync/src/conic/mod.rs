//! Small dense semidefinite programming over affine LMI blocks:
//!
//! minimize `cᵀv` subject to `E v = f` and, per block,
//! `F(v) = F₀ + Σ v_k F_k ⪰ δI`.
//!
//! Equality constraints are eliminated by nullspace projection, data is
//! normalized to unit max-norm, and the reduced problem goes to a primal-dual
//! path-following interior-point method with Nesterov–Todd scaling and
//! Mehrotra predictor-corrector steps. Problems here stay tiny (tens of
//! variables, blocks at most ~15×15), so everything is dense and
//! deterministic: a fixed initialization and no randomized pivoting mean
//! identical inputs produce identical outputs.

mod ipm;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::matkit::{nullspace, qr_lstsq, sym_eig, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub enum ConicError {
    /// A factorization broke down inside the interior-point iteration.
    NumericalBreakdown(&'static str),
    /// A coefficient matrix is not symmetric.
    AsymmetricBlock { block: usize },
    /// A variable with nonzero objective appears in no LMI block.
    UnboundedDirection { var: usize },
}

impl fmt::Display for ConicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConicError::NumericalBreakdown(what) => write!(f, "numerical breakdown: {what}"),
            ConicError::AsymmetricBlock { block } => write!(f, "block {block} has an asymmetric coefficient"),
            ConicError::UnboundedDirection { var } => {
                write!(f, "variable {var} is unconstrained but carries objective weight")
            }
        }
    }
}

impl core::error::Error for ConicError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

/// One affine LMI block `F₀ + Σ v_k F_k ⪰ margin·I`.
#[derive(Debug, Clone)]
pub struct LmiBlock {
    pub dim: usize,
    pub f0: Matrix,
    pub coeffs: Vec<(usize, Matrix)>,
    pub margin: f64,
}

/// Affine matrix expression `M₀ + Σ v_k M_k`; the workhorse for assembling
/// LMI blocks out of problem variables.
#[derive(Debug, Clone)]
pub struct AffineMat {
    pub rows: usize,
    pub cols: usize,
    pub m0: Matrix,
    pub terms: Vec<(usize, Matrix)>,
}

impl AffineMat {
    pub fn constant(m: Matrix) -> Self {
        AffineMat { rows: m.rows(), cols: m.cols(), m0: m, terms: Vec::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        AffineMat::constant(Matrix::zeros(rows, cols))
    }

    /// A rows×cols matrix whose entry (i, j) is the variable `idx(i, j)`.
    pub fn from_matrix_vars(rows: usize, cols: usize, mut idx: impl FnMut(usize, usize) -> usize) -> Self {
        let mut terms = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let mut m = Matrix::zeros(rows, cols);
                m[(i, j)] = 1.0;
                terms.push((idx(i, j), m));
            }
        }
        AffineMat { rows, cols, m0: Matrix::zeros(rows, cols), terms }
    }

    /// A symmetric p×p matrix parameterized by its upper triangle, with
    /// variables `start..start + p(p+1)/2` in row-major upper-triangle order.
    pub fn from_sym_vars(p: usize, start: usize) -> Self {
        let mut terms = Vec::new();
        let mut k = start;
        for i in 0..p {
            for j in i..p {
                let mut m = Matrix::zeros(p, p);
                m[(i, j)] = 1.0;
                m[(j, i)] = 1.0;
                terms.push((k, m));
                k += 1;
            }
        }
        AffineMat { rows: p, cols: p, m0: Matrix::zeros(p, p), terms }
    }

    /// A weighted combination `Σ v_{start+k} B_k` of fixed symmetric basis
    /// matrices.
    pub fn from_basis(basis: &[Matrix], start: usize) -> Self {
        assert!(!basis.is_empty());
        let (rows, cols) = (basis[0].rows(), basis[0].cols());
        let terms = basis.iter().enumerate().map(|(k, b)| (start + k, b.clone())).collect();
        AffineMat { rows, cols, m0: Matrix::zeros(rows, cols), terms }
    }

    pub fn transpose(&self) -> AffineMat {
        AffineMat {
            rows: self.cols,
            cols: self.rows,
            m0: self.m0.transpose(),
            terms: self.terms.iter().map(|(k, m)| (*k, m.transpose())).collect(),
        }
    }

    pub fn left_mul(&self, m: &Matrix) -> AffineMat {
        AffineMat {
            rows: m.rows(),
            cols: self.cols,
            m0: m * &self.m0,
            terms: self.terms.iter().map(|(k, t)| (*k, m * t)).collect(),
        }
    }

    pub fn add(&self, other: &AffineMat) -> AffineMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AffineMat { rows: self.rows, cols: self.cols, m0: &self.m0 + &other.m0, terms }
    }

    pub fn sub_const(&self, m: &Matrix) -> AffineMat {
        AffineMat { rows: self.rows, cols: self.cols, m0: &self.m0 - m, terms: self.terms.clone() }
    }

    pub fn scale(&self, s: f64) -> AffineMat {
        AffineMat {
            rows: self.rows,
            cols: self.cols,
            m0: self.m0.scale(s),
            terms: self.terms.iter().map(|(k, m)| (*k, m.scale(s))).collect(),
        }
    }

    pub fn eval(&self, v: &[f64]) -> Matrix {
        let mut m = self.m0.clone();
        for (k, t) in &self.terms {
            m = &m + &t.scale(v[*k]);
        }
        m
    }

    /// Assemble the symmetric 2×2 block matrix [[A, Bᵀ], [B, D]].
    pub fn block2x2_sym(a: &AffineMat, b: &AffineMat, d: &AffineMat) -> AffineMat {
        assert_eq!(a.rows, a.cols);
        assert_eq!(d.rows, d.cols);
        assert_eq!(b.cols, a.rows);
        assert_eq!(b.rows, d.rows);
        let n = a.rows + d.rows;
        let place = |m: &Matrix, r0: usize, c0: usize| {
            let mut out = Matrix::zeros(n, n);
            out.set_block(r0, c0, m);
            out
        };
        let mut m0 = place(&a.m0, 0, 0);
        m0.set_block(a.rows, a.rows, &d.m0);
        m0.set_block(a.rows, 0, &b.m0);
        m0.set_block(0, a.rows, &b.m0.transpose());
        let mut terms: Vec<(usize, Matrix)> = Vec::new();
        for (k, t) in &a.terms {
            terms.push((*k, place(t, 0, 0)));
        }
        for (k, t) in &d.terms {
            terms.push((*k, place(t, a.rows, a.rows)));
        }
        for (k, t) in &b.terms {
            let mut m = place(t, a.rows, 0);
            m.set_block(0, a.rows, &t.transpose());
            terms.push((*k, m));
        }
        AffineMat { rows: n, cols: n, m0, terms }
    }
}

/// Linear-objective SDP over a scalar variable vector.
#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    nvars: usize,
    objective: Vec<f64>,
    eq_rows: Vec<(Vec<(usize, f64)>, f64)>,
    blocks: Vec<LmiBlock>,
}

/// Solver options; the defaults satisfy the solution contract
/// (relative residuals and duality gap at optimality below 1e-7).
#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Phase-I slack threshold deciding feasibility.
    pub feas_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { max_iter: 200, tol: 1e-8, feas_tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub v: Vec<f64>,
    pub objective: f64,
    pub status: SdpStatus,
    /// Normalized duality gap of the scaled reduced problem at exit.
    pub gap: f64,
    pub iterations: usize,
    /// Dual certificate: one PSD multiplier per block of the reduced scaled
    /// problem.
    pub dual_blocks: Vec<Matrix>,
    /// Phase-I slack `s*` when produced by [`SdpProblem::feasibility`];
    /// feasible iff `s* ≤ feas_tol`.
    pub phase1_slack: Option<f64>,
    /// Objective value `cᵀv` at each interior-point iteration.
    pub objective_trace: Vec<f64>,
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem::default()
    }

    pub fn add_vars(&mut self, count: usize) -> usize {
        let start = self.nvars;
        self.nvars += count;
        self.objective.resize(self.nvars, 0.0);
        start
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn add_equality(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.eq_rows.push((terms, rhs));
    }

    /// Add `aff(v) ⪰ margin·I` for a square symmetric affine expression.
    /// Coefficients are symmetrized; per-variable terms are merged.
    pub fn add_affine_block(&mut self, aff: &AffineMat, margin: f64) {
        assert_eq!(aff.rows, aff.cols);
        let mut merged: Vec<(usize, Matrix)> = Vec::new();
        for (k, t) in &aff.terms {
            match merged.iter_mut().find(|(j, _)| j == k) {
                Some((_, m)) => *m = &*m + t,
                None => merged.push((*k, t.clone())),
            }
        }
        let coeffs = merged
            .into_iter()
            .map(|(k, m)| (k, m.symmetrize()))
            .filter(|(_, m)| m.max_abs() > 0.0)
            .collect();
        self.blocks.push(LmiBlock { dim: aff.rows, f0: aff.m0.symmetrize(), coeffs, margin });
    }

    /// Scalar inequality `const + Σ coeff·v ≥ 0` as a 1×1 block.
    pub fn add_scalar_ineq(&mut self, constant: f64, terms: &[(usize, f64)]) {
        let coeffs = terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|&(k, c)| (k, Matrix::diag(&[c])))
            .collect();
        self.blocks.push(LmiBlock { dim: 1, f0: Matrix::diag(&[constant]), coeffs, margin: 0.0 });
    }

    /// Trace-slack epigraph of `trace(ΓᵀRΓ)`: fresh symmetric slack `Z`, the
    /// Schur block `[[Z, Γᵀ], [Γ, R⁻¹]] ⪰ 0` and `trace Z` added to the
    /// objective. Returns the index of the first `Z` variable.
    pub fn add_trace_slack(&mut self, gamma: &AffineMat, r_inv: &Matrix) -> usize {
        let nbar = gamma.cols;
        assert_eq!(r_inv.rows(), gamma.rows);
        let z_start = self.add_vars(nbar * (nbar + 1) / 2);
        let z = AffineMat::from_sym_vars(nbar, z_start);
        let block = AffineMat::block2x2_sym(&z, gamma, &AffineMat::constant(r_inv.clone()));
        self.add_affine_block(&block, 0.0);
        let mut k = z_start;
        for i in 0..nbar {
            for j in i..nbar {
                if i == j {
                    self.objective[k] += 1.0;
                }
                k += 1;
            }
        }
        z_start
    }

    /// Evaluate all blocks at `v` and return the worst margin violation
    /// `max_b (margin_b − λ_min(F_b(v)))`, negative when strictly inside.
    pub fn worst_violation(&self, v: &[f64]) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for b in &self.blocks {
            let mut m = b.f0.clone();
            for (k, t) in &b.coeffs {
                m = &m + &t.scale(v[*k]);
            }
            let lam = sym_eig(&m).0[0];
            worst = worst.max(b.margin - lam);
        }
        worst
    }

    /// Plain-text dump of the assembled problem (dimensions first, then every
    /// matrix row-major) for external cross-checking.
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "sdp vars {} eqs {} blocks {}", self.nvars, self.eq_rows.len(), self.blocks.len());
        let _ = writeln!(s, "objective {:?}", self.objective);
        for (i, (terms, rhs)) in self.eq_rows.iter().enumerate() {
            let _ = writeln!(s, "eq {i} rhs {rhs} terms {terms:?}");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let _ = writeln!(s, "block {i} dim {} margin {}", b.dim, b.margin);
            let mut dump_mat = |label: String, m: &Matrix| {
                let _ = writeln!(s, "{label}");
                for r in 0..m.rows() {
                    let row: Vec<String> = m.row(r).iter().map(|x| alloc::format!("{x}")).collect();
                    let _ = writeln!(s, "  {}", row.join(" "));
                }
            };
            dump_mat(String::from("F0"), &b.f0);
            for (k, t) in &b.coeffs {
                dump_mat(alloc::format!("F var {k}"), t);
            }
        }
        s
    }

    /// Minimize the objective. A phase-I feasibility pass runs first; an
    /// infeasible problem is reported as status [`SdpStatus::Infeasible`].
    pub fn solve(&self, opts: &SdpOptions) -> Result<SdpSolution, ConicError> {
        let phase1 = self.feasibility(opts)?;
        let slack = phase1.phase1_slack.unwrap_or(f64::INFINITY);
        if phase1.status != SdpStatus::Optimal || slack > opts.feas_tol {
            return Ok(SdpSolution { status: SdpStatus::Infeasible, ..phase1 });
        }
        self.solve_reduced(opts)
    }

    /// Phase-I: minimize `s` with `F_b(v) + s·I ⪰ margin_b·I` on every block
    /// (and `s ≥ −1` to keep the objective bounded). `s* ≤ 0` certifies
    /// feasibility of the original constraint set.
    pub fn feasibility(&self, opts: &SdpOptions) -> Result<SdpSolution, ConicError> {
        let mut aug = self.clone();
        aug.objective.iter_mut().for_each(|c| *c = 0.0);
        let s_var = aug.add_vars(1);
        aug.set_objective(s_var, 1.0);
        for b in aug.blocks.iter_mut() {
            b.coeffs.push((s_var, Matrix::identity(b.dim)));
        }
        aug.add_scalar_ineq(1.0, &[(s_var, 1.0)]);
        // widen equality rows to the new variable count implicitly (sparse)
        let mut sol = aug.solve_reduced(opts)?;
        let slack = sol.v.get(s_var).copied().unwrap_or(f64::INFINITY);
        sol.phase1_slack = Some(slack);
        sol.v.truncate(self.nvars);
        sol.objective = slack;
        Ok(sol)
    }

    /// Eliminate equalities, scale, and run the interior-point method.
    fn solve_reduced(&self, opts: &SdpOptions) -> Result<SdpSolution, ConicError> {
        for (bi, b) in self.blocks.iter().enumerate() {
            if b.f0.asymmetry() > 1e-9 * b.f0.max_abs().max(1.0) {
                return Err(ConicError::AsymmetricBlock { block: bi });
            }
            for (_, t) in &b.coeffs {
                if t.asymmetry() > 1e-9 * t.max_abs().max(1.0) {
                    return Err(ConicError::AsymmetricBlock { block: bi });
                }
            }
        }
        let d = self.nvars;

        // particular solution and nullspace of the equality constraints
        let (v0, nmat) = if self.eq_rows.is_empty() {
            (vec![0.0; d], Matrix::identity(d))
        } else {
            let k = self.eq_rows.len();
            let mut e = Matrix::zeros(k, d);
            let mut f = Matrix::zeros(k, 1);
            for (r, (terms, rhs)) in self.eq_rows.iter().enumerate() {
                for &(j, c) in terms {
                    e[(r, j)] += c;
                }
                f[(r, 0)] = *rhs;
            }
            let scale = e.max_abs().max(f.max_abs()).max(1.0);
            let (v0m, res) = qr_lstsq(&e, &f);
            if res > 1e-8 * scale {
                // inconsistent equalities: no feasible point at all
                return Ok(SdpSolution {
                    v: vec![0.0; d],
                    objective: 0.0,
                    status: SdpStatus::Infeasible,
                    gap: f64::INFINITY,
                    iterations: 0,
                    dual_blocks: Vec::new(),
                    phase1_slack: None,
                    objective_trace: Vec::new(),
                });
            }
            (v0m.vec_col(), nullspace(&e, 1e-10))
        };
        let dr = nmat.cols();
        let offset: f64 = self.objective.iter().zip(v0.iter()).map(|(c, v)| c * v).sum();

        // reduced blocks: F̃₀ = F₀ − margin·I + Σ v0_k F_k, F̃_j = Σ_k N_kj F_k
        let mut red_f0: Vec<Matrix> = Vec::with_capacity(self.blocks.len());
        let mut red_fk: Vec<Vec<Matrix>> = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let mut f0 = &b.f0 - &Matrix::identity(b.dim).scale(b.margin);
            for (k, t) in &b.coeffs {
                f0 = &f0 + &t.scale(v0[*k]);
            }
            let mut fks = vec![Matrix::zeros(b.dim, b.dim); dr];
            for (k, t) in &b.coeffs {
                for j in 0..dr {
                    let w = nmat[(*k, j)];
                    if w != 0.0 {
                        fks[j] = &fks[j] + &t.scale(w);
                    }
                }
            }
            red_f0.push(f0);
            red_fk.push(fks);
        }
        let mut red_c: Vec<f64> = (0..dr)
            .map(|j| (0..d).map(|k| self.objective[k] * nmat[(k, j)]).sum())
            .collect();

        if dr == 0 {
            // equality constraints pin the point; just check the cone
            let feasible = self.worst_violation(&v0) <= opts.feas_tol;
            return Ok(SdpSolution {
                v: v0,
                objective: offset,
                status: if feasible { SdpStatus::Optimal } else { SdpStatus::Infeasible },
                gap: 0.0,
                iterations: 0,
                dual_blocks: Vec::new(),
                phase1_slack: None,
                objective_trace: Vec::new(),
            });
        }

        // variable scaling to unit max-norm across blocks
        let mut vscale = vec![0.0f64; dr];
        for fks in &red_fk {
            for (j, fk) in fks.iter().enumerate() {
                vscale[j] = vscale[j].max(fk.max_abs());
            }
        }
        for (j, s) in vscale.iter_mut().enumerate() {
            if *s == 0.0 {
                if red_c[j] != 0.0 {
                    return Err(ConicError::UnboundedDirection { var: j });
                }
                *s = 1.0;
            }
        }
        for fks in red_fk.iter_mut() {
            for (j, fk) in fks.iter_mut().enumerate() {
                *fk = fk.scale(1.0 / vscale[j]);
            }
        }
        for (j, c) in red_c.iter_mut().enumerate() {
            *c /= vscale[j];
        }

        // block scaling
        let mut drop_mask = vec![false; red_f0.len()];
        for (bi, f0) in red_f0.iter_mut().enumerate() {
            let mut t = f0.max_abs();
            for fk in &red_fk[bi] {
                t = t.max(fk.max_abs());
            }
            if t == 0.0 {
                drop_mask[bi] = true;
                continue;
            }
            *f0 = f0.scale(1.0 / t);
            for fk in red_fk[bi].iter_mut() {
                *fk = fk.scale(1.0 / t);
            }
        }
        let keep: Vec<usize> = (0..red_f0.len()).filter(|&i| !drop_mask[i]).collect();
        let f0s: Vec<Matrix> = keep.iter().map(|&i| red_f0[i].clone()).collect();
        let fks: Vec<Vec<Matrix>> = keep.iter().map(|&i| red_fk[i].clone()).collect();

        let out = ipm::minimize(&red_c, &f0s, &fks, opts)?;

        let mut v = v0;
        for j in 0..dr {
            let wj = out.w[j] / vscale[j];
            for k in 0..d {
                v[k] += nmat[(k, j)] * wj;
            }
        }
        let objective: f64 = self.objective.iter().zip(v.iter()).map(|(c, x)| c * x).sum();
        debug_assert!((objective - (offset + red_c.iter().zip(out.w.iter()).map(|(c, w)| c * w).sum::<f64>())).abs() <= 1e-6 * (1.0 + objective.abs()));
        let objective_trace: Vec<f64> = out.objective_trace.iter().map(|t| offset + t).collect();
        Ok(SdpSolution {
            v,
            objective,
            status: out.status,
            gap: out.gap,
            iterations: out.iterations,
            dual_blocks: out.dual_blocks,
            phase1_slack: None,
            objective_trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_x_on_hyperbola() {
        // min x s.t. [[x, 1], [1, x]] ⪰ 0  →  x* = 1
        let mut p = SdpProblem::new();
        let x = p.add_vars(1);
        p.set_objective(x, 1.0);
        let mut aff = AffineMat::zeros(2, 2);
        aff.m0[(0, 1)] = 1.0;
        aff.m0[(1, 0)] = 1.0;
        let mut t = Matrix::zeros(2, 2);
        t[(0, 0)] = 1.0;
        t[(1, 1)] = 1.0;
        aff.terms.push((x, t));
        p.add_affine_block(&aff, 0.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.v[0] - 1.0).abs() < 1e-7, "x* = {}", sol.v[0]);
        assert!(sol.gap <= 1e-7 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn eigenvalue_bound() {
        // min t s.t. tI − S ⪰ 0  →  t* = λ_max(S)
        let s = Matrix::from_rows(&[&[2.0, -1.0, 0.3], &[-1.0, 1.0, 0.5], &[0.3, 0.5, -0.7]]);
        let lam_max = *sym_eig(&s).0.last().unwrap();
        let mut p = SdpProblem::new();
        let t = p.add_vars(1);
        p.set_objective(t, 1.0);
        let mut aff = AffineMat::constant(s.scale(-1.0));
        aff.terms.push((t, Matrix::identity(3)));
        p.add_affine_block(&aff, 0.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - lam_max).abs() < 1e-6);
    }

    #[test]
    fn infeasible_trace_cap() {
        // X ⪰ I with trace X ≤ 1 is infeasible for 2×2
        let mut p = SdpProblem::new();
        let x = p.add_vars(3);
        let xaff = AffineMat::from_sym_vars(2, x);
        p.add_affine_block(&xaff.sub_const(&Matrix::identity(2)), 0.0);
        p.add_scalar_ineq(1.0, &[(x, -1.0), (x + 2, -1.0)]);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn feasibility_slack_sign() {
        // t free in "min t, tI − S ⪰ 0" is feasible
        let s = Matrix::identity(2);
        let mut p = SdpProblem::new();
        let t = p.add_vars(1);
        let mut aff = AffineMat::constant(s.scale(-1.0));
        aff.terms.push((t, Matrix::identity(2)));
        p.add_affine_block(&aff, 0.0);
        let sol = p.feasibility(&SdpOptions::default()).unwrap();
        assert!(sol.phase1_slack.unwrap() <= 0.0);

        // contradictory scalar bounds: v ≥ 1 and −v ≥ 0
        let mut q = SdpProblem::new();
        let v = q.add_vars(1);
        q.add_scalar_ineq(-1.0, &[(v, 1.0)]);
        q.add_scalar_ineq(0.0, &[(v, -1.0)]);
        let sol = q.feasibility(&SdpOptions::default()).unwrap();
        assert!(sol.phase1_slack.unwrap() > 1e-3);
    }

    #[test]
    fn equality_elimination() {
        // min x + y s.t. x = y, [[x, 1], [1, y]] ⪰ 0 → x = y = 1
        let mut p = SdpProblem::new();
        let x = p.add_vars(2);
        p.set_objective(x, 1.0);
        p.set_objective(x + 1, 1.0);
        p.add_equality(vec![(x, 1.0), (x + 1, -1.0)], 0.0);
        let mut aff = AffineMat::zeros(2, 2);
        aff.m0[(0, 1)] = 1.0;
        aff.m0[(1, 0)] = 1.0;
        let mut t0 = Matrix::zeros(2, 2);
        t0[(0, 0)] = 1.0;
        let mut t1 = Matrix::zeros(2, 2);
        t1[(1, 1)] = 1.0;
        aff.terms.push((x, t0));
        aff.terms.push((x + 1, t1));
        p.add_affine_block(&aff, 0.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.v[0] - 1.0).abs() < 1e-6);
        assert!((sol.v[1] - 1.0).abs() < 1e-6);
        assert!((sol.objective - 2.0).abs() < 1e-6);
    }

    #[test]
    fn trace_slack_scalar() {
        // Γ = 2 constant, R = 1: min trace Z = 4
        let mut p = SdpProblem::new();
        let gamma = AffineMat::constant(Matrix::diag(&[2.0]));
        p.add_trace_slack(&gamma, &Matrix::identity(1));
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 4.0).abs() < 1e-6);
    }

    #[test]
    fn trace_slack_zero_gamma() {
        let mut p = SdpProblem::new();
        let gamma = AffineMat::zeros(1, 2);
        p.add_trace_slack(&gamma, &Matrix::identity(1));
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert!(sol.objective.abs() < 1e-7);
    }

    #[test]
    fn trace_slack_matches_direct_trace() {
        // random fixed Γ, R: min trace Z = trace(ΓᵀRΓ)
        let g = Matrix::from_rows(&[&[0.7, -1.2, 0.4], &[0.1, 0.8, -0.5]]);
        let r = Matrix::from_rows(&[&[2.0, 0.3], &[0.3, 1.0]]);
        let direct = (&(&g.transpose() * &r) * &g).trace();
        let mut p = SdpProblem::new();
        let gamma = AffineMat::constant(g.clone());
        p.add_trace_slack(&gamma, &r.inverse().unwrap());
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert!((sol.objective - direct).abs() < 1e-6 * (1.0 + direct));
    }

    #[test]
    fn determinism() {
        let build = || {
            let mut p = SdpProblem::new();
            let t = p.add_vars(1);
            p.set_objective(t, 1.0);
            let s = Matrix::from_rows(&[&[1.3, 0.2], &[0.2, -0.4]]);
            let mut aff = AffineMat::constant(s.scale(-1.0));
            aff.terms.push((t, Matrix::identity(2)));
            p.add_affine_block(&aff, 1e-8);
            p.solve(&SdpOptions::default()).unwrap()
        };
        let a = build();
        let b = build();
        assert_eq!(a.v[0].to_bits(), b.v[0].to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn dump_contains_dimensions() {
        let mut p = SdpProblem::new();
        let t = p.add_vars(1);
        p.set_objective(t, 1.0);
        p.add_scalar_ineq(1.0, &[(t, 1.0)]);
        let dump = p.dump_text();
        assert!(dump.contains("sdp vars 1 eqs 0 blocks 1"));
        assert!(dump.contains("F0"));
    }
}
