//! Canonical exosystem: block-diagonal generator (one zero block, one
//! rotation block per harmonic pair), normalized initial-value set, period,
//! flow and the structured invariant-ellipsoid parameterization.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fp;
use crate::matkit::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ExoError {
    DuplicateFrequency(f64),
    NegativeFrequency(f64),
    ZeroMultiplicity(f64),
    DimensionMismatch { expected: usize, got: usize },
    NonPositiveAmplitude(f64),
    /// A frequency ratio could not be rationalized within the denominator cap.
    IrrationalRatio { ratio: f64 },
}

impl fmt::Display for ExoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExoError::DuplicateFrequency(w) => write!(f, "duplicate frequency {w}"),
            ExoError::NegativeFrequency(w) => write!(f, "negative frequency {w}"),
            ExoError::ZeroMultiplicity(w) => write!(f, "zero multiplicity for frequency {w}"),
            ExoError::DimensionMismatch { expected, got } => {
                write!(f, "output matrix has {got} columns, exosystem order is {expected}")
            }
            ExoError::NonPositiveAmplitude(a) => write!(f, "non-positive amplitude {a}"),
            ExoError::IrrationalRatio { ratio } => {
                write!(f, "frequency ratio {ratio} has no rational approximation below the cap")
            }
        }
    }
}

impl core::error::Error for ExoError {}

/// One diagonal block of the generator: the constant block (ω = 0) of size
/// m(0), or a harmonic block of size 2·m(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqBlock {
    pub omega: f64,
    pub multiplicity: usize,
    /// First state index of the block.
    pub start: usize,
    /// Number of states in the block.
    pub dim: usize,
}

/// Canonical marginally stable exosystem.
///
/// The generator is `diag(0_{m(0)}, ω_1 (I ⊗ J), …)` with `J = [[0,1],[-1,0]]`
/// and distinct frequencies in ascending order. Amplitude bounds are folded
/// into the output matrix by a diagonal state transform, so the admissible
/// initial set is normalized: |x_l(0)| ≤ 1 per constant state and
/// ‖x̂_h(0)‖₂ ≤ 1 per harmonic pair.
#[derive(Debug, Clone)]
pub struct Exosystem {
    abar: Matrix,
    cbar: Matrix,
    blocks: Vec<FreqBlock>,
    period: f64,
    xbar_b: Vec<f64>,
}

/// Continued-fraction rationalization `x ≈ p/q` with `q ≤ cap`.
fn rationalize(x: f64, cap: u64) -> Option<(u64, u64)> {
    if x <= 0.0 || !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (1u64, 0u64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut frac = x;
    for _ in 0..64 {
        let a = fp::floor(frac) as u64;
        let h = a.checked_mul(h0)?.checked_add(h1)?;
        let k = a.checked_mul(k0)?.checked_add(k1)?;
        if k > cap {
            break;
        }
        h1 = h0;
        h0 = h;
        k1 = k0;
        k0 = k;
        let rem = frac - a as f64;
        if fp::abs(x - h as f64 / k as f64) <= 1e-13 * x {
            return Some((h, k));
        }
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if k0 > 0 && fp::abs(x - h0 as f64 / k0 as f64) <= 1e-13 * x {
        Some((h0, k0))
    } else {
        None
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest common period of the nonzero frequencies: the least `T > 0` with
/// `T·ω/(2π)` integer for every ω ≠ 0. Returns 1 s when every frequency is
/// zero (any horizon works for a constant reference).
pub fn period(freqs: &[f64]) -> Result<f64, ExoError> {
    let nonzero: Vec<f64> = freqs.iter().copied().filter(|w| *w != 0.0).collect();
    if nonzero.is_empty() {
        return Ok(1.0);
    }
    let base = nonzero[0];
    let mut lcm_q = 1u64;
    for &w in &nonzero {
        let ratio = w / base;
        let (p, q) = rationalize(ratio, 1_000_000).ok_or(ExoError::IrrationalRatio { ratio })?;
        let q = q / gcd(p, q);
        lcm_q = lcm_q / gcd(lcm_q, q) * q;
    }
    Ok(2.0 * core::f64::consts::PI * lcm_q as f64 / base)
}

/// Build the canonical exosystem from `(frequency, multiplicity)` pairs, the
/// raw output rows and per-block amplitude maxima (one per constant state,
/// one per harmonic pair, in state order).
pub fn build_exosystem(
    freq_spec: &[(f64, usize)],
    raw_output: &Matrix,
    amplitudes: &[f64],
) -> Result<Exosystem, ExoError> {
    let mut spec = freq_spec.to_vec();
    spec.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair in spec.windows(2) {
        if fp::abs(pair[0].0 - pair[1].0) <= 1e-12 {
            return Err(ExoError::DuplicateFrequency(pair[0].0));
        }
    }

    let mut blocks = Vec::new();
    let mut start = 0;
    for &(omega, mult) in &spec {
        if omega < 0.0 {
            return Err(ExoError::NegativeFrequency(omega));
        }
        if mult == 0 {
            return Err(ExoError::ZeroMultiplicity(omega));
        }
        let dim = if omega == 0.0 { mult } else { 2 * mult };
        blocks.push(FreqBlock { omega, multiplicity: mult, start, dim });
        start += dim;
    }
    let n = start;

    if raw_output.cols() != n {
        return Err(ExoError::DimensionMismatch { expected: n, got: raw_output.cols() });
    }
    let unit_blocks: usize = blocks.iter().map(|b| b.multiplicity).sum();
    if amplitudes.len() != unit_blocks {
        return Err(ExoError::DimensionMismatch { expected: unit_blocks, got: amplitudes.len() });
    }
    for &a in amplitudes {
        if !(a > 0.0) {
            return Err(ExoError::NonPositiveAmplitude(a));
        }
    }

    let mut abar = Matrix::zeros(n, n);
    let mut xbar_b = vec![0.0; n];
    let mut scale = vec![1.0; n];
    let mut unit = 0;
    for b in &blocks {
        if b.omega == 0.0 {
            for l in 0..b.multiplicity {
                xbar_b[b.start + l] = 1.0;
                scale[b.start + l] = amplitudes[unit];
                unit += 1;
            }
        } else {
            for h in 0..b.multiplicity {
                let i = b.start + 2 * h;
                abar[(i, i + 1)] = b.omega;
                abar[(i + 1, i)] = -b.omega;
                xbar_b[i + 1] = 1.0;
                scale[i] = amplitudes[unit];
                scale[i + 1] = amplitudes[unit];
                unit += 1;
            }
        }
    }

    // fold amplitude maxima into the output map: C̄ = C_raw · diag(scale)
    let cbar = Matrix::from_fn(raw_output.rows(), n, |i, j| raw_output[(i, j)] * scale[j]);

    let freqs: Vec<f64> = blocks.iter().map(|b| b.omega).collect();
    let period = period(&freqs)?;

    Ok(Exosystem { abar, cbar, blocks, period, xbar_b })
}

impl Exosystem {
    pub fn order(&self) -> usize {
        self.abar.rows()
    }

    pub fn output_count(&self) -> usize {
        self.cbar.rows()
    }

    pub fn abar(&self) -> &Matrix {
        &self.abar
    }

    pub fn cbar(&self) -> &Matrix {
        &self.cbar
    }

    pub fn blocks(&self) -> &[FreqBlock] {
        &self.blocks
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn boundary_vector(&self) -> &[f64] {
        &self.xbar_b
    }

    /// Number of constant scalar states m(0).
    pub fn constant_count(&self) -> usize {
        self.blocks.iter().find(|b| b.omega == 0.0).map_or(0, |b| b.multiplicity)
    }

    /// Total number of harmonic pairs Σ_j m(ω_j).
    pub fn pair_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.omega != 0.0).map(|b| b.multiplicity).sum()
    }

    /// State indices (start of pair) of every harmonic pair in order.
    pub fn pair_starts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for b in &self.blocks {
            if b.omega != 0.0 {
                for h in 0..b.multiplicity {
                    out.push(b.start + 2 * h);
                }
            }
        }
        out
    }

    /// Exact flow x̄(t) = e^{Āt} x̄(0): constants are frozen, each harmonic
    /// pair rotates with its own frequency.
    pub fn flow(&self, x0: &[f64], t: f64) -> Vec<f64> {
        assert_eq!(x0.len(), self.order());
        let mut x = x0.to_vec();
        for b in &self.blocks {
            if b.omega == 0.0 {
                continue;
            }
            let (c, s) = (fp::cos(b.omega * t), fp::sin(b.omega * t));
            for h in 0..b.multiplicity {
                let i = b.start + 2 * h;
                let (a, bb) = (x0[i], x0[i + 1]);
                x[i] = c * a + s * bb;
                x[i + 1] = -s * a + c * bb;
            }
        }
        x
    }

    /// Basis of the symmetric block-diagonal solutions of `PĀ + ĀᵀP = 0`
    /// with the structure required of the invariant ellipsoid: one
    /// `e_l e_lᵀ` per constant state and one embedded `I₂` per harmonic pair
    /// (the commutation constraint forces each 2×2 block to a multiple of the
    /// identity).
    pub fn ellipsoid_basis(&self) -> Vec<Matrix> {
        let n = self.order();
        let mut basis = Vec::new();
        for b in &self.blocks {
            if b.omega == 0.0 {
                for l in 0..b.multiplicity {
                    let mut m = Matrix::zeros(n, n);
                    m[(b.start + l, b.start + l)] = 1.0;
                    basis.push(m);
                }
            } else {
                for h in 0..b.multiplicity {
                    let i = b.start + 2 * h;
                    let mut m = Matrix::zeros(n, n);
                    m[(i, i)] = 1.0;
                    m[(i + 1, i + 1)] = 1.0;
                    basis.push(m);
                }
            }
        }
        basis
    }

    /// Deterministic samples on the distinguished boundary of the normalized
    /// initial set: every constant state at ±1, every harmonic pair on its
    /// unit circle. Enumerates sign patterns × phase grids; the first sample
    /// is the boundary vector itself. When the exosystem has no harmonic
    /// pairs the extreme set is finite, so at most 2^m(0) samples exist.
    pub fn sample_boundary(&self, count: usize) -> Vec<Vec<f64>> {
        assert!(count >= 1);
        let m0 = self.constant_count();
        let pairs = self.pair_starts();
        let signs = 1usize << m0;

        let mut phase_res = if pairs.is_empty() { 1 } else { 4 };
        let total = |r: usize| -> usize {
            let mut t = signs;
            for _ in 0..pairs.len() {
                t = t.saturating_mul(r);
            }
            t
        };
        while !pairs.is_empty() && total(phase_res) < count {
            phase_res *= 2;
        }

        let n = self.order();
        let mut phase_combos = 1usize;
        for _ in 0..pairs.len() {
            phase_combos = phase_combos.saturating_mul(phase_res);
        }
        let available = total(phase_res);
        let mut out = Vec::with_capacity(count.min(available));
        for idx in 0..count.min(available) {
            // signs vary slowest so the all-plus / zero-phase boundary
            // vector comes first; the last pair's phase varies fastest
            let s = idx / phase_combos;
            let mut rest = idx % phase_combos;
            let mut phase_idx = vec![0usize; pairs.len()];
            for k in (0..pairs.len()).rev() {
                phase_idx[k] = rest % phase_res;
                rest /= phase_res;
            }

            let mut x = vec![0.0; n];
            let mut bit = 0;
            for b in &self.blocks {
                if b.omega == 0.0 {
                    for l in 0..b.multiplicity {
                        x[b.start + l] = if s >> bit & 1 == 0 { 1.0 } else { -1.0 };
                        bit += 1;
                    }
                }
            }
            for (k, &i) in pairs.iter().enumerate() {
                let theta = 2.0 * core::f64::consts::PI * phase_idx[k] as f64 / phase_res as f64;
                x[i] = fp::sin(theta);
                x[i + 1] = fp::cos(theta);
            }
            out.push(x);
        }
        out
    }
}
