//! Closed-loop simulation of the full heterogeneous network, consensus
//! trajectory prediction, error-bound verification and stationary energy
//! measurement.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exocore::Exosystem;
use crate::fp;
use crate::matkit::Matrix;
use crate::model::{AgentModel, SyncDesign};
use crate::netgraph::{perron_weights, DiGraph, NetError};

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// A state trace left the finite range (divergence guard).
    NonFiniteState { time: f64 },
    /// The requested energy window does not fit in the record.
    WindowOutOfRange { start: f64, end: f64, t_end: f64 },
    Net(NetError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NonFiniteState { time } => write!(f, "state diverged at t = {time}"),
            SimError::WindowOutOfRange { start, end, t_end } => {
                write!(f, "energy window [{start}, {end}] outside simulated horizon {t_end}")
            }
            SimError::Net(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<NetError> for SimError {
    fn from(e: NetError) -> Self {
        SimError::Net(e)
    }
}

/// One agent of the closed-loop network with its completed design.
#[derive(Debug, Clone)]
pub struct AgentRun {
    pub model: AgentModel,
    pub design: SyncDesign,
}

/// Full closed-loop scenario. Initial exosystem states may lie outside the
/// normalized admissible set per agent; what matters for the error bounds is
/// that their consensus combination stays inside.
#[derive(Clone)]
pub struct NetworkScenario<'a> {
    pub graph: &'a DiGraph,
    pub exo: &'a Exosystem,
    pub bbar: Matrix,
    pub kbar: Matrix,
    pub agents: Vec<AgentRun>,
    pub init_exo: Vec<Vec<f64>>,
    /// Agent initial states; zero vectors when `None` (agents at rest).
    pub init_agent: Option<Vec<Vec<f64>>>,
    pub step: f64,
    pub t_end: f64,
}

/// Dense record of one simulation run on a uniform grid.
pub struct SimulationRecord {
    pub times: Vec<f64>,
    /// Per agent: states, outputs, inputs, exosystem copies, sync errors
    /// (rows indexed by time step).
    pub agents: Vec<AgentTrace>,
    /// Predicted consensus exostate x̄(t) on the same grid.
    pub consensus: Matrix,
    /// Predicted consensus initial state x̄(0).
    pub consensus_x0: Vec<f64>,
    pub step: f64,
}

pub struct AgentTrace {
    pub states: Matrix,
    pub outputs: Matrix,
    pub inputs: Matrix,
    pub exo_states: Matrix,
    /// ỹ_i(t) = y_i(t) − ȳ(t) against the predicted consensus output.
    pub sync_error: Matrix,
}

/// Predict the consensus exostate from the left Perron weights of the
/// Laplacian and return its flow.
pub fn consensus_trajectory(graph: &DiGraph, exo: &Exosystem, init_exo: &[Vec<f64>]) -> Result<Vec<f64>, SimError> {
    let w = perron_weights(graph)?;
    let n = exo.order();
    let mut x0 = vec![0.0; n];
    for (wi, xi) in w.iter().zip(init_exo.iter()) {
        for k in 0..n {
            x0[k] += wi * xi[k];
        }
    }
    Ok(x0)
}

/// Classic fixed-step fourth-order integration of the coupled network. The
/// closed loop is linear and time invariant, so the whole network is
/// assembled once as `ż = M z` with z stacking every agent state and every
/// exosystem copy.
pub fn simulate(scenario: &NetworkScenario<'_>) -> Result<SimulationRecord, SimError> {
    let n_agents = scenario.agents.len();
    let nbar = scenario.exo.order();
    let p = scenario.exo.output_count();
    assert_eq!(scenario.init_exo.len(), n_agents);

    // state layout: [x_1, …, x_N, x̄_1, …, x̄_N]
    let state_dims: Vec<usize> = scenario.agents.iter().map(|a| a.model.state_count()).collect();
    let agent_total: usize = state_dims.iter().sum();
    let total = agent_total + n_agents * nbar;
    let x_off: Vec<usize> = {
        let mut off = vec![0usize; n_agents];
        let mut acc = 0;
        for i in 0..n_agents {
            off[i] = acc;
            acc += state_dims[i];
        }
        off
    };
    let xb_off = |i: usize| agent_total + i * nbar;

    let lap = scenario.graph.laplacian();
    let bk = &scenario.bbar * &scenario.kbar;

    let mut m = Matrix::zeros(total, total);
    for (i, run) in scenario.agents.iter().enumerate() {
        let am = &run.model;
        let d = &run.design;
        // ẋ_i = (A − BK) x_i + B(KΠ + Γ) x̄_i
        let a_cl = &am.a - &(&am.b * &d.k);
        let feed = &am.b * &(&(&d.k * &d.pi) + &d.gamma);
        m.set_block(x_off[i], x_off[i], &a_cl);
        m.set_block(x_off[i], xb_off(i), &feed);
        // ẋ̄_i = Ā x̄_i − B̄K̄ Σ_j l_ij x̄_j
        m.set_block(xb_off(i), xb_off(i), scenario.exo.abar());
        for j in 0..n_agents {
            let lij = lap[(i, j)];
            if lij != 0.0 {
                let mut blk = m.block(xb_off(i), xb_off(j), nbar, nbar);
                blk = &blk - &bk.scale(lij);
                m.set_block(xb_off(i), xb_off(j), &blk);
            }
        }
    }

    let mut z = vec![0.0; total];
    for i in 0..n_agents {
        if let Some(init) = &scenario.init_agent {
            for (k, v) in init[i].iter().enumerate() {
                z[x_off[i] + k] = *v;
            }
        }
        for k in 0..nbar {
            z[xb_off(i) + k] = scenario.init_exo[i][k];
        }
    }

    let steps = fp::round(scenario.t_end / scenario.step) as usize;
    let h = scenario.step;
    let consensus_x0 = consensus_trajectory(scenario.graph, scenario.exo, &scenario.init_exo)?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut traces: Vec<AgentTrace> = scenario
        .agents
        .iter()
        .map(|run| AgentTrace {
            states: Matrix::zeros(steps + 1, run.model.state_count()),
            outputs: Matrix::zeros(steps + 1, p),
            inputs: Matrix::zeros(steps + 1, run.model.input_count()),
            exo_states: Matrix::zeros(steps + 1, nbar),
            sync_error: Matrix::zeros(steps + 1, p),
        })
        .collect();
    let mut consensus = Matrix::zeros(steps + 1, nbar);

    let axpy = |acc: &mut [f64], a: f64, v: &[f64]| {
        for (x, y) in acc.iter_mut().zip(v.iter()) {
            *x += a * y;
        }
    };

    for step_idx in 0..=steps {
        let t = step_idx as f64 * h;
        times.push(t);
        let xbar_t = scenario.exo.flow(&consensus_x0, t);
        let ybar = scenario.exo.cbar().matvec(&xbar_t);
        for k in 0..nbar {
            consensus[(step_idx, k)] = xbar_t[k];
        }

        for (i, run) in scenario.agents.iter().enumerate() {
            let am = &run.model;
            let d = &run.design;
            let xi = &z[x_off[i]..x_off[i] + state_dims[i]];
            let xbi = &z[xb_off(i)..xb_off(i) + nbar];
            if xi.iter().chain(xbi.iter()).any(|v| !v.is_finite() || fp::abs(*v) > 1e12) {
                return Err(SimError::NonFiniteState { time: t });
            }
            let yi = am.c.matvec(xi);
            // u_i = −K(x_i − Π x̄_i) + Γ x̄_i
            let pix = d.pi.matvec(xbi);
            let dx: Vec<f64> = xi.iter().zip(pix.iter()).map(|(a, b)| a - b).collect();
            let mut ui = d.gamma.matvec(xbi);
            axpy(&mut ui, -1.0, &d.k.matvec(&dx));

            let tr = &mut traces[i];
            for (k, v) in xi.iter().enumerate() {
                tr.states[(step_idx, k)] = *v;
            }
            for k in 0..p {
                tr.outputs[(step_idx, k)] = yi[k];
                tr.sync_error[(step_idx, k)] = yi[k] - ybar[k];
            }
            for (k, v) in ui.iter().enumerate() {
                tr.inputs[(step_idx, k)] = *v;
            }
            for (k, v) in xbi.iter().enumerate() {
                tr.exo_states[(step_idx, k)] = *v;
            }
        }

        if step_idx == steps {
            break;
        }
        // classic RK4 step on ż = M z
        let k1 = m.matvec(&z);
        let mut z2 = z.clone();
        axpy(&mut z2, 0.5 * h, &k1);
        let k2 = m.matvec(&z2);
        let mut z3 = z.clone();
        axpy(&mut z3, 0.5 * h, &k2);
        let k3 = m.matvec(&z3);
        let mut z4 = z.clone();
        axpy(&mut z4, h, &k3);
        let k4 = m.matvec(&z4);
        for k in 0..total {
            z[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
    }

    Ok(SimulationRecord { times, agents: traces, consensus, consensus_x0, step: h })
}

impl SimulationRecord {
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Worst pairwise exosystem disagreement max_{i,j} ‖x̄_i(t) − x̄_j(t)‖_∞
    /// at the last recorded step.
    pub fn final_exo_disagreement(&self) -> f64 {
        let last = self.times.len() - 1;
        let mut worst = 0.0f64;
        for i in 0..self.agents.len() {
            for j in (i + 1)..self.agents.len() {
                for k in 0..self.consensus.cols() {
                    let d = fp::abs(self.agents[i].exo_states[(last, k)] - self.agents[j].exo_states[(last, k)]);
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Deviation of each agent's exosystem copy from the predicted consensus
    /// at the last recorded step.
    pub fn final_consensus_deviation(&self) -> f64 {
        let last = self.times.len() - 1;
        let mut worst = 0.0f64;
        for tr in &self.agents {
            for k in 0..self.consensus.cols() {
                worst = worst.max(fp::abs(tr.exo_states[(last, k)] - self.consensus[(last, k)]));
            }
        }
        worst
    }
}

/// Report of the worst stationary error per output over sampled initial
/// states and a dense time grid.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub per_output: Vec<BoundCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub epsilon: f64,
    pub sup: f64,
    /// sup − ε, positive when violated.
    pub violation: f64,
    pub worst_sample: usize,
    pub worst_time: f64,
}

/// Verify the per-output stationary error bounds
/// `|e_jᵀ(CΠ−C̄)x̄(t)| ≤ ε_j` by sampling the distinguished boundary of the
/// admissible set (the error is linear in x̄, so interior points cannot beat
/// boundary points) against a uniform time grid over one period.
pub fn verify_error_bounds(
    agent: &AgentModel,
    pi: &Matrix,
    exo: &Exosystem,
    epsilon: &[f64],
    boundary_samples: usize,
    time_samples: usize,
) -> BoundReport {
    let err = &(&agent.c * pi) - exo.cbar();
    let samples = exo.sample_boundary(boundary_samples);
    let p = err.rows();
    let mut per_output: Vec<BoundCheck> = epsilon
        .iter()
        .map(|&e| BoundCheck { epsilon: e, sup: 0.0, violation: 0.0, worst_sample: 0, worst_time: 0.0 })
        .collect();

    for (si, x0) in samples.iter().enumerate() {
        for ti in 0..time_samples {
            let t = exo.period() * ti as f64 / time_samples as f64;
            let x = exo.flow(x0, t);
            let e = err.matvec(&x);
            for j in 0..p {
                let mag = fp::abs(e[j]);
                if mag > per_output[j].sup {
                    per_output[j].sup = mag;
                    per_output[j].worst_sample = si;
                    per_output[j].worst_time = t;
                }
            }
        }
    }
    for check in per_output.iter_mut() {
        check.violation = check.sup - check.epsilon;
    }
    let pass = per_output.iter().all(|c| c.sup <= c.epsilon + 1e-6);
    BoundReport { per_output, pass }
}

/// Trapezoidal stationary input energy `½∫ x̄ᵀΓᵀRΓx̄ dt` over one period
/// along the consensus trajectory, starting past the transient.
pub fn measure_energy(
    record: &SimulationRecord,
    exo: &Exosystem,
    gamma: &Matrix,
    r: &Matrix,
    window_start: f64,
) -> Result<f64, SimError> {
    let t_end = record.t_end();
    let period = exo.period();
    if window_start < 0.0 || window_start + period > t_end + 1e-9 {
        return Err(SimError::WindowOutOfRange { start: window_start, end: window_start + period, t_end });
    }
    let w = (&(&gamma.transpose() * r) * gamma).symmetrize();
    let steps = (period / record.step).ceil() as usize;
    let h = period / steps as f64;
    let g = |t: f64| {
        let x = exo.flow(&record.consensus_x0, t);
        let wx = w.matvec(&x);
        wx.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut acc = 0.5 * (g(window_start) + g(window_start + period));
    for k in 1..steps {
        acc += g(window_start + k as f64 * h);
    }
    Ok(0.5 * acc * h)
}

/// Residual of the stationary manifold at the end of the horizon:
/// `max_i ‖x_i(t_end) − Π_i x̄_i(t_end)‖_∞`.
pub fn transition_check(record: &SimulationRecord, designs: &[SyncDesign]) -> f64 {
    let last = record.times.len() - 1;
    let mut worst = 0.0f64;
    for (tr, d) in record.agents.iter().zip(designs.iter()) {
        let xb: Vec<f64> = (0..tr.exo_states.cols()).map(|k| tr.exo_states[(last, k)]).collect();
        let target = d.pi.matvec(&xb);
        for (k, tv) in target.iter().enumerate() {
            worst = worst.max(fp::abs(tr.states[(last, k)] - tv));
        }
    }
    worst
}
