//! One-period Floquet map and multi-step evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fft::{Dft, Direction};
use crate::statevec::{check_qubits, Basis, MomentumIndexing, StateVector};

/// Map parameters `(n_q, K, M)` with derived `T = 2πM/2^{n_q}` and `k = K/T`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapParams {
    n_q: usize,
    big_k: f64,
    m: u64,
}

impl MapParams {
    pub fn new(n_q: usize, big_k: f64, m: u64) -> Result<Self> {
        check_qubits(n_q)?;
        if !(big_k > 0.0) || !big_k.is_finite() {
            return Err(Error::Domain(format!("K must be positive and finite, got {big_k}")));
        }
        if m == 0 {
            return Err(Error::Domain("M must be a positive integer".into()));
        }
        Ok(Self { n_q, big_k, m })
    }

    /// Parameters whose [`nominal_ell`](Self::nominal_ell) equals `ell` at fixed `n_q` and `M`.
    pub fn from_nominal_ell(n_q: usize, m: u64, ell: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::Domain(format!("ell must be positive, got {ell}")));
        }
        check_qubits(n_q)?;
        let t = period(n_q, m);
        let big_k = 0.25 * t * (3.0 * ell).sqrt() / PI;
        Self::new(n_q, big_k, m)
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        1 << self.n_q
    }

    /// Classical chaos parameter `K`.
    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Effective Planck constant `T = 2πM/2^{n_q}`.
    pub fn t(&self) -> f64 {
        period(self.n_q, self.m)
    }

    /// Kick strength `k = K/T`.
    pub fn k(&self) -> f64 {
        self.big_k / self.t()
    }

    /// Localization length on the scale used to label sweeps:
    /// `π²k'²/3` with `k' = K/T'` and `T' = T/4`, so sixteen times `π²k²/3`.
    pub fn nominal_ell(&self) -> f64 {
        crate::analysis::theoretical_ell(4.0 * self.k())
    }
}

fn period(n_q: usize, m: u64) -> f64 {
    2.0 * PI * m as f64 / (1u64 << n_q) as f64
}

/// Precomputed phase tables and transform plan for one [`MapParams`].
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    n_q: usize,
    kinetic: Vec<Complex64>,
    // kick phase times 1/N, absorbing both transform normalizations
    kick: Vec<Complex64>,
    dft: Dft,
    exec: Execution,
}

impl FloquetOperator {
    pub fn new(params: &MapParams) -> Self {
        let idx = MomentumIndexing::new(params.n_q()).expect("validated by MapParams");
        let dim = idx.dim();
        let modulus = 2 * dim as u128;
        let m = params.m() as u128;
        // T n²/2 = π M n² / N, reduced exactly modulo 2π in integers.
        let kinetic = (0..dim)
            .map(|s| {
                let n = idx.momentum(s).unsigned_abs() as u128;
                let r = (m * n * n) % modulus;
                Complex64::from_polar(1.0, -PI * r as f64 / dim as f64)
            })
            .collect();
        let k = params.k();
        let inv = 1.0 / dim as f64;
        let kick = (0..dim)
            .map(|j| {
                let x = 2.0 * PI * j as f64 / dim as f64 - PI;
                Complex64::from_polar(inv, k * x * x)
            })
            .collect();
        Self {
            n_q: params.n_q(),
            kinetic,
            kick,
            dft: Dft::new(dim),
            exec: Execution::default(),
        }
    }

    /// Operator with both phase tables set to one.
    pub fn identity(n_q: usize) -> Result<Self> {
        let dim = MomentumIndexing::new(n_q)?.dim();
        Ok(Self {
            n_q,
            kinetic: vec![Complex64::new(1.0, 0.0); dim],
            kick: vec![Complex64::new(1.0 / dim as f64, 0.0); dim],
            dft: Dft::new(dim),
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    /// Kinetic phase `e^{-iTn²/2}` per storage slot.
    pub fn kinetic_phases(&self) -> &[Complex64] {
        &self.kinetic
    }

    /// One Floquet period in place.
    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        psi.require_basis(Basis::Momentum)?;
        if psi.n_q() != self.n_q {
            return Err(Error::Argument(format!(
                "state has {} qubits, operator has {}",
                psi.n_q(),
                self.n_q
            )));
        }
        let amps = psi.amplitudes_mut();
        exec::mul_assign(self.exec, amps, &self.kinetic);
        self.dft.transform_unscaled(amps, Direction::MomentumToAngle, self.exec);
        exec::mul_assign(self.exec, amps, &self.kick);
        self.dft.transform_unscaled(amps, Direction::AngleToMomentum, self.exec);
        Ok(())
    }

    /// Applies the map `steps` times, calling every observer after each step
    /// with the 1-based step count.
    pub fn evolve(
        &self,
        mut psi: StateVector,
        steps: usize,
        observers: &mut [&mut dyn Observer],
    ) -> Result<StateVector> {
        for step in 1..=steps {
            self.apply(&mut psi)?;
            for obs in observers.iter_mut() {
                obs.observe(step, &psi)?;
            }
        }
        Ok(psi)
    }
}

/// Per-step callback used by [`evolve`].
pub trait Observer {
    fn observe(&mut self, step: usize, psi: &StateVector) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(usize, &StateVector) -> Result<()>,
{
    fn observe(&mut self, step: usize, psi: &StateVector) -> Result<()> {
        self(step, psi)
    }
}

/// Unitary transform to the angle basis.
pub fn dft_momentum_to_angle(mut psi: StateVector) -> Result<StateVector> {
    psi.require_basis(Basis::Momentum)?;
    let dft = Dft::new(psi.dim());
    dft.forward(psi.amplitudes_mut(), Execution::default());
    psi.set_basis(Basis::Angle);
    Ok(psi)
}

/// Unitary transform back to the momentum basis.
pub fn dft_angle_to_momentum(mut psi: StateVector) -> Result<StateVector> {
    psi.require_basis(Basis::Angle)?;
    let dft = Dft::new(psi.dim());
    dft.inverse(psi.amplitudes_mut(), Execution::default());
    psi.set_basis(Basis::Momentum);
    Ok(psi)
}

/// `U ψ` for a single step. Builds the phase tables on every call; use
/// [`FloquetOperator`] when stepping repeatedly.
pub fn apply_floquet(mut psi: StateVector, params: &MapParams) -> Result<StateVector> {
    if psi.n_q() != params.n_q() {
        return Err(Error::Argument(format!(
            "state has {} qubits, parameters have {}",
            psi.n_q(),
            params.n_q()
        )));
    }
    FloquetOperator::new(params).apply(&mut psi)?;
    Ok(psi)
}

pub fn evolve(
    psi0: StateVector,
    params: &MapParams,
    steps: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<StateVector> {
    if psi0.n_q() != params.n_q() {
        return Err(Error::Argument(format!(
            "state has {} qubits, parameters have {}",
            psi0.n_q(),
            params.n_q()
        )));
    }
    FloquetOperator::new(params).evolve(psi0, steps, observers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::momentum_eigenstate;

    fn random_state(n_q: usize, seed: u64) -> StateVector {
        crate::statevec::random_state(n_q, seed).unwrap()
    }

    #[test]
    fn params_derived() {
        let p = MapParams::new(10, 2f64.sqrt(), 1000).unwrap();
        assert_eq!(p.t(), 2.0 * PI * 1000.0 / 1024.0);
        assert!((p.k() * p.t() - p.big_k()).abs() <= 1e-12 * p.big_k());
        assert!(MapParams::new(10, 0.0, 1).is_err());
        assert!(MapParams::new(10, -1.0, 1).is_err());
        assert!(MapParams::new(10, 1.0, 0).is_err());
        assert!(matches!(MapParams::new(1, 1.0, 1), Err(Error::Size(1))));
    }

    #[test]
    fn nominal_ell_round_trip() {
        for ell in [0.01, 0.7, 31.0, 512.0] {
            let p = MapParams::from_nominal_ell(10, 300, ell).unwrap();
            assert!((p.nominal_ell() / ell - 1.0).abs() < 1e-12);
        }
        // quoted lengths for K = √2, n_q = 10
        for (m, ell) in [(300, 31.0), (1000, 2.8), (700, 5.7), (2000, 0.7), (500, 11.0)] {
            let p = MapParams::new(10, 2f64.sqrt(), m).unwrap();
            assert!((p.nominal_ell() / ell - 1.0).abs() < 0.05, "M={m}: {}", p.nominal_ell());
        }
    }

    #[test]
    fn identity_operator() {
        let op = FloquetOperator::identity(6).unwrap();
        let psi = random_state(6, 3);
        let mut out = psi.clone();
        op.apply(&mut out).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_spreads_and_keeps_norm() {
        let p = MapParams::new(8, 1.0, 37).unwrap();
        let psi = apply_floquet(momentum_eigenstate(8, 0).unwrap(), &p).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(psi.amplitudes()[0].norm() < 1.0);
    }

    #[test]
    fn kinetic_phase_symmetric_in_momentum() {
        let p = MapParams::new(7, 1.3, 11).unwrap();
        let op = FloquetOperator::new(&p);
        let idx = MomentumIndexing::new(7).unwrap();
        for n in 1..64 {
            let a = op.kinetic_phases()[idx.slot(n).unwrap()];
            let b = op.kinetic_phases()[idx.slot(-n).unwrap()];
            assert_eq!(a, b);
        }
    }

    #[test]
    fn kinetic_phase_matches_float_formula() {
        let p = MapParams::new(6, 1.0, 5).unwrap();
        let op = FloquetOperator::new(&p);
        let idx = MomentumIndexing::new(6).unwrap();
        for s in 0..64 {
            let n = idx.momentum(s) as f64;
            let direct = Complex64::from_polar(1.0, -p.t() * n * n / 2.0);
            assert!((op.kinetic_phases()[s] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn semigroup() {
        let p = MapParams::new(7, 2.0, 13).unwrap();
        let psi = random_state(7, 11);
        let a = evolve(psi.clone(), &p, 3, &mut []).unwrap();
        let ab = evolve(a, &p, 5, &mut []).unwrap();
        let direct = evolve(psi.clone(), &p, 8, &mut []).unwrap();
        for (x, y) in ab.amplitudes().iter().zip(direct.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
        assert_eq!(evolve(psi.clone(), &p, 0, &mut []).unwrap(), psi);
    }

    #[test]
    fn observers_see_every_step() {
        let p = MapParams::new(5, 1.0, 3).unwrap();
        let mut seen = Vec::new();
        let mut obs = |step: usize, psi: &StateVector| {
            seen.push((step, psi.norm_sqr()));
            Ok(())
        };
        evolve(momentum_eigenstate(5, 0).unwrap(), &p, 4, &mut [&mut obs]).unwrap();
        assert_eq!(seen.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn basis_and_size_checks() {
        let p = MapParams::new(5, 1.0, 3).unwrap();
        let angle = dft_momentum_to_angle(momentum_eigenstate(5, 0).unwrap()).unwrap();
        assert!(matches!(apply_floquet(angle.clone(), &p), Err(Error::Basis { .. })));
        assert!(matches!(dft_momentum_to_angle(angle), Err(Error::Basis { .. })));
        assert!(matches!(
            apply_floquet(momentum_eigenstate(6, 0).unwrap(), &p),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn dft_examples() {
        let psi = dft_momentum_to_angle(momentum_eigenstate(4, 0).unwrap()).unwrap();
        assert_eq!(psi.basis(), Basis::Angle);
        for a in psi.amplitudes() {
            assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
        let back = dft_angle_to_momentum(psi).unwrap();
        assert!((back.amplitudes()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(back.amplitudes()[1..].iter().all(|a| a.norm() < 1e-15));

        let r = random_state(6, 5);
        let rt = dft_angle_to_momentum(dft_momentum_to_angle(r.clone()).unwrap()).unwrap();
        for (x, y) in r.amplitudes().iter().zip(rt.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
