//! Statevector storage and the binary coding of momentum onto qubits.
//!
//! Momentum `n` lives in the symmetric window `(-N/2, N/2]` with `N = 2^n_q`
//! and is stored at slot `n mod N`. The slot index is the binary coding of
//! the qubit register: qubit label `i` (1-based) is bit `i - 1` of the slot,
//! so qubit 1 is the least significant.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 26;

/// Tolerance on `Σ|ψ|² = 1` accepted by constructors.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Which conjugate basis the amplitudes are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Momentum,
    Angle,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Momentum => "momentum",
            Basis::Angle => "angle",
        }
    }
}

/// Index arithmetic between signed momentum and storage slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumIndexing {
    n_q: usize,
}

impl MomentumIndexing {
    pub fn new(n_q: usize) -> Result<Self> {
        check_qubits(n_q)?;
        Ok(Self { n_q })
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_q
    }

    /// Storage slot of momentum `n`, `n mod N` taken non-negative.
    pub fn slot(&self, n: i64) -> Result<usize> {
        let half = (self.dim() / 2) as i64;
        if n <= -half || n > half {
            return Err(Error::Index { n, lo: -half, hi: half });
        }
        Ok(n.rem_euclid(self.dim() as i64) as usize)
    }

    /// Signed momentum stored at `slot`.
    #[inline]
    pub fn momentum(&self, slot: usize) -> i64 {
        let dim = self.dim();
        debug_assert!(slot < dim);
        if slot <= dim / 2 {
            slot as i64
        } else {
            slot as i64 - dim as i64
        }
    }

    /// Value of qubit `label` (1-based) in the binary coding of `slot`.
    #[inline]
    pub fn qubit_value(&self, slot: usize, label: usize) -> u8 {
        ((slot >> (label - 1)) & 1) as u8
    }
}

pub(crate) fn check_qubits(n_q: usize) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&n_q) {
        Ok(())
    } else {
        Err(Error::Size(n_q))
    }
}

/// `N = 2^{n_q}` complex amplitudes of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    n_q: usize,
    basis: Basis,
}

impl StateVector {
    /// Wraps raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, basis: Basis) -> Result<Self> {
        let len = amplitudes.len();
        if len < (1 << MIN_QUBITS) || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude count {len} is not a power of two >= {}",
                1 << MIN_QUBITS
            )));
        }
        let n_q = len.trailing_zeros() as usize;
        check_qubits(n_q)?;
        let state = Self { amplitudes, n_q, basis };
        let drift = (state.norm_sqr() - 1.0).abs();
        if !(drift <= NORM_TOLERANCE) {
            return Err(Error::Domain(format!("state norm² deviates from 1 by {drift:e}")));
        }
        Ok(state)
    }

    /// Constructor for kernels that preserve norm by construction.
    pub(crate) fn from_parts_unchecked(amplitudes: Vec<Complex64>, n_q: usize, basis: Basis) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_q);
        Self { amplitudes, n_q, basis }
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn indexing(&self) -> MomentumIndexing {
        MomentumIndexing { n_q: self.n_q }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub(crate) fn set_basis(&mut self, basis: Basis) {
        self.basis = basis;
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|ψ(s)|²` per slot.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn require_basis(&self, expected: Basis) -> Result<()> {
        if self.basis == expected {
            Ok(())
        } else {
            Err(Error::Basis {
                expected: expected.name(),
                found: self.basis.name(),
            })
        }
    }
}

/// Momentum eigenstate `|n0⟩`.
pub fn momentum_eigenstate(n_q: usize, n0: i64) -> Result<StateVector> {
    let idx = MomentumIndexing::new(n_q)?;
    let slot = idx.slot(n0)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); idx.dim()];
    amplitudes[slot] = Complex64::new(1.0, 0.0);
    Ok(StateVector::from_parts_unchecked(amplitudes, n_q, Basis::Momentum))
}

/// Flat random-phase state on `⌈ℓ⌉` consecutive momenta starting at `center`.
///
/// Phases are drawn uniformly on `[0, 2π)` from a ChaCha8 stream seeded with
/// `seed`, one draw per populated slot in increasing momentum order.
pub fn flat_phase_localized_state(n_q: usize, ell: f64, center: i64, seed: u64) -> Result<StateVector> {
    let idx = MomentumIndexing::new(n_q)?;
    if !(ell >= 1.0) || !ell.is_finite() {
        return Err(Error::Domain(format!("flat-state width must be >= 1, got {ell}")));
    }
    let count = ell.ceil() as i64;
    let last = center + count - 1;
    let half = (idx.dim() / 2) as i64;
    if center <= -half || last > half {
        return Err(Error::Domain(format!(
            "window [{center}, {last}] does not fit inside ({}, {half}]",
            -half
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus = 1.0 / (count as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); idx.dim()];
    for n in center..=last {
        let phase = std::f64::consts::TAU * rng.random::<f64>();
        amplitudes[idx.slot(n)?] = Complex64::from_polar(modulus, phase);
    }
    Ok(StateVector::from_parts_unchecked(amplitudes, n_q, Basis::Momentum))
}

/// Normalized state with independent uniform real and imaginary parts.
///
/// Used for cross-checks and property tests; the ensemble is not Haar.
pub fn random_state(n_q: usize, seed: u64) -> Result<StateVector> {
    let idx = MomentumIndexing::new(n_q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..idx.dim())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(StateVector::from_parts_unchecked(amps, n_q, Basis::Momentum))
}

/// Coarse-graining distance `|2^{j-1} - 2^{i-1}|` between two qubit labels.
pub fn coarse_graining_distance(i: usize, j: usize) -> Result<u64> {
    if i == j {
        return Err(Error::Argument(format!(
            "coarse-graining distance needs i != j, got {i}"
        )));
    }
    if i == 0 || j == 0 || i > 63 || j > 63 {
        return Err(Error::Argument(format!(
            "qubit labels must be in 1..=63, got ({i}, {j})"
        )));
    }
    let (a, b) = (1u64 << (i - 1), 1u64 << (j - 1));
    Ok(a.abs_diff(b))
}
