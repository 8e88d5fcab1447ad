//! Communication-graph modeling: Laplacian, spanning-tree test and the
//! exosystem synchronization gain.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fp;
use crate::matkit::{self, eig, is_hurwitz_complex, solve_care, MatError, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub enum NetError {
    /// Edge endpoints out of range or a self-loop.
    InvalidEdge { from: usize, to: usize },
    /// The graph has no directed spanning tree.
    NoSpanningTree,
    /// Graph search and the Laplacian zero-eigenvalue multiplicity disagree.
    InconsistentCheck { reachability: bool, zero_multiplicity: usize },
    /// σ exceeds min_{i≥2} Re λ_i(L) or is not positive.
    SigmaTooLarge { sigma: f64, bound: f64 },
    /// The exosystem pair is not stabilizable.
    NotStabilizable,
    Mat(MatError),
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::InvalidEdge { from, to } => write!(f, "invalid edge {from} -> {to}"),
            NetError::NoSpanningTree => write!(f, "graph has no directed spanning tree"),
            NetError::InconsistentCheck { reachability, zero_multiplicity } => write!(
                f,
                "spanning-tree checks disagree: reachability {reachability}, Laplacian zero multiplicity {zero_multiplicity}"
            ),
            NetError::SigmaTooLarge { sigma, bound } => {
                write!(f, "sigma {sigma} outside (0, {bound}]")
            }
            NetError::NotStabilizable => write!(f, "exosystem pair is not stabilizable"),
            NetError::Mat(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for NetError {}

impl From<MatError> for NetError {
    fn from(e: MatError) -> Self {
        NetError::Mat(e)
    }
}

/// Time-invariant directed graph on vertices `0..n`. An edge `(i, j)` means
/// vertex `j` receives information from vertex `i`.
#[derive(Debug, Clone)]
pub struct DiGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl DiGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetError> {
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(NetError::InvalidEdge { from: i, to: j });
            }
        }
        Ok(DiGraph { n, edges: edges.to_vec() })
    }

    /// Directed ring 0 → 1 → … → n−1 → 0.
    pub fn ring(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        DiGraph { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
        }
        a
    }

    /// In-degree Laplacian: `l_ii = Σ_k a_ki`, `l_ij = −a_ji` for i ≠ j.
    pub fn laplacian(&self) -> Matrix {
        let a = self.adjacency();
        Matrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                (0..self.n).map(|k| a[(k, i)]).sum()
            } else {
                -a[(j, i)]
            }
        })
    }

    /// Vertices reachable from `root` along directed edges.
    fn reach_count(&self, root: usize) -> usize {
        let mut seen = vec![false; self.n];
        let mut queue = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = queue.pop() {
            for &(i, j) in &self.edges {
                if i == v && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push(j);
                }
            }
        }
        count
    }

    /// Directed spanning tree test: some vertex reaches all others. The
    /// graph-search answer is cross-checked against the multiplicity of the
    /// zero Laplacian eigenvalue.
    pub fn has_spanning_tree(&self) -> Result<bool, NetError> {
        let by_search = (0..self.n).any(|r| self.reach_count(r) == self.n);
        let spec = eig(&self.laplacian())?;
        let zero_mult = spec.values().iter().filter(|z| z.norm() <= 1e-8).count();
        let by_eig = zero_mult == 1;
        if by_search != by_eig {
            return Err(NetError::InconsistentCheck { reachability: by_search, zero_multiplicity: zero_mult });
        }
        Ok(by_search)
    }
}

/// `min_{i≥2} Re λ_i(L)` over the nonzero part of the Laplacian spectrum.
pub fn sigma_bound(g: &DiGraph) -> Result<f64, NetError> {
    if !g.has_spanning_tree()? {
        return Err(NetError::NoSpanningTree);
    }
    let spec = eig(&g.laplacian())?;
    let mut values = spec.values().to_vec();
    // remove the single zero eigenvalue, then take the smallest real part
    let zero_idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    values.remove(zero_idx);
    Ok(values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// Default design scalar: 95% of the admissible upper bound.
pub fn default_sigma(g: &DiGraph) -> Result<f64, NetError> {
    Ok(0.95 * sigma_bound(g)?)
}

/// Synchronization gain for the homogeneous exosystems: `K̄ = σ⁻¹ B̄ᵀ P̄`
/// with `P̄` the stabilizing solution of `ĀᵀP̄ + P̄Ā − P̄B̄B̄ᵀP̄ + I = 0`.
#[derive(Debug, Clone)]
pub struct SyncGain {
    pub kbar: Matrix,
    pub sigma: f64,
    pub pbar: Matrix,
}

/// Compute the gain and validate that `Ā − λ_i(L) B̄ K̄` is Hurwitz for every
/// nonzero Laplacian eigenvalue (complex eigenvalues through the real
/// 2n-embedding).
pub fn sync_gain(abar: &Matrix, bbar: &Matrix, sigma: f64, g: &DiGraph) -> Result<SyncGain, NetError> {
    let bound = sigma_bound(g)?;
    if !(sigma > 0.0 && sigma <= bound + 1e-12) {
        return Err(NetError::SigmaTooLarge { sigma, bound });
    }
    let n = abar.rows();
    let pbar = solve_care(abar, bbar, &Matrix::identity(n), &Matrix::identity(bbar.cols())).map_err(|e| match e {
        MatError::NotStabilizable => NetError::NotStabilizable,
        other => NetError::Mat(other),
    })?;
    let kbar = &bbar.transpose().scale(1.0 / sigma) * &pbar;

    let spec = eig(&g.laplacian())?;
    let bk = &(bbar * &kbar);
    for z in spec.values() {
        if z.norm() <= 1e-8 {
            continue;
        }
        let re = &abar.clone() - &bk.scale(z.re);
        let im = bk.scale(-z.im);
        if !is_hurwitz_complex(&re, &im)? {
            return Err(NetError::SigmaTooLarge { sigma, bound });
        }
    }
    Ok(SyncGain { kbar, sigma, pbar })
}

/// Nonnegative left null vector of the Laplacian normalized to sum one: the
/// weight vector defining the consensus value of the synchronized exosystems.
pub fn perron_weights(g: &DiGraph) -> Result<Vec<f64>, NetError> {
    if !g.has_spanning_tree()? {
        return Err(NetError::NoSpanningTree);
    }
    let lt = g.laplacian().transpose();
    let basis = matkit::nullspace(&lt, 1e-10);
    debug_assert_eq!(basis.cols(), 1);
    let mut w: Vec<f64> = (0..g.vertex_count()).map(|i| basis[(i, 0)]).collect();
    let total: f64 = w.iter().sum();
    for wi in w.iter_mut() {
        *wi /= total;
        if fp::abs(*wi) < 1e-12 {
            *wi = 0.0;
        }
    }
    Ok(w)
}
