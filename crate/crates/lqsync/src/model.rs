//! Shared agent-level data: state-space models and completed per-agent
//! designs.

use crate::matkit::Matrix;

/// One heterogeneous agent `(A, B, C)` with `n` states, `m` inputs and `p`
/// outputs. `p` must match the exosystem output count; `n` and `m` may differ
/// across the network.
#[derive(Debug, Clone)]
pub struct AgentModel {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl AgentModel {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Self {
        assert!(a.is_square());
        assert_eq!(b.rows(), a.rows());
        assert_eq!(c.cols(), a.rows());
        AgentModel { a, b, c }
    }

    pub fn state_count(&self) -> usize {
        self.a.rows()
    }

    pub fn input_count(&self) -> usize {
        self.b.cols()
    }

    pub fn output_count(&self) -> usize {
        self.c.rows()
    }
}

/// Everything the tracking control law needs:
/// `u = −K (x − Π x̄) + Γ x̄`.
#[derive(Debug, Clone)]
pub struct SyncDesign {
    /// Stabilizer gain, m×n.
    pub k: Matrix,
    /// Stationary state map, n×n̄.
    pub pi: Matrix,
    /// Stationary input map (pre-filter), m×n̄.
    pub gamma: Matrix,
}
