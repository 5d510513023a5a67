//! Oracle-equivalence checks runnable from the command line.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{FloquetOperator, MapParams};
use crate::entanglement::{
    block_entropy, concurrence, reduce_to_block, reduce_to_pair, von_neumann_entropy, DensityMatrix,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::fft::{Dft, Direction};
use crate::oracle;
use crate::statevec::{momentum_eigenstate, random_state};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation.
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: error <= tolerance,
            error,
            tolerance,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<40} max error {:.3e} (tolerance {:.0e})",
            self.name, self.error, self.tolerance
        )
    }
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Transform against the direct `O(N²)` sum, `n_q = 2..=6`, unitary normalization.
pub fn dft_check() -> Result<Check> {
    let mut err: f64 = 0.0;
    for n_q in 2..=6 {
        let psi = random_state(n_q, 100 + n_q as u64)?;
        let dft = Dft::new(psi.dim());
        let scale = 1.0 / (psi.dim() as f64).sqrt();
        for (dir, sign) in [(Direction::MomentumToAngle, 1.0), (Direction::AngleToMomentum, -1.0)] {
            let mut fast = psi.amplitudes().to_vec();
            dft.transform_unscaled(&mut fast, dir, Execution::Sequential);
            let slow = oracle::direct_dft(psi.amplitudes(), sign);
            for (a, b) in fast.iter().zip(&slow) {
                err = err.max((a * scale - b * scale).norm());
            }
        }
    }
    Ok(Check::new("transform vs direct summation", err, 1e-10))
}

/// Pair and contiguous-block reductions against the dense projector, `n_q = 2..=6`.
pub fn partial_trace_check() -> Result<Check> {
    let mut err: f64 = 0.0;
    for n_q in 2..=6 {
        let psi = random_state(n_q, 200 + n_q as u64)?;
        for i in 1..=n_q {
            for j in i + 1..=n_q {
                let fast = reduce_to_pair(&psi, i, j)?;
                let slow = oracle::dense_partial_trace(psi.amplitudes(), &[j, i]);
                err = err.max(max_diff(fast.entries(), &slow));
            }
        }
        for start in 1..=n_q {
            for end in start..=n_q {
                if end - start + 1 == n_q {
                    continue;
                }
                let block: Vec<usize> = (start..=end).collect();
                let fast = reduce_to_block(&psi, &block)?;
                let slow = oracle::dense_partial_trace(psi.amplitudes(), &block);
                err = err.max(max_diff(fast.entries(), &slow));
            }
        }
    }
    Ok(Check::new("partial trace vs dense projector", err, 1e-12))
}

fn dm4(m: &nalgebra::Matrix4<Complex64>) -> Result<DensityMatrix> {
    DensityMatrix::new(DMatrix::from_fn(4, 4, |r, c| m[(r, c)]), vec![1, 2])
}

/// Bell, product and Werner states against closed forms and the Schur oracle.
pub fn concurrence_check() -> Result<Check> {
    let mut err: f64 = 0.0;
    let mut product = nalgebra::Matrix4::zeros();
    product[(0, 0)] = Complex64::new(1.0, 0.0);
    let cases = [(oracle::werner(1.0), 1.0), (product, 0.0), (oracle::werner(0.8), 0.7)];
    for (rho, expect) in &cases {
        let fast = concurrence(&dm4(rho)?)?.value;
        let slow = oracle::concurrence(rho)?;
        err = err.max((fast - expect).abs()).max((slow - expect).abs());
    }
    for seed in 0..20 {
        let psi = random_state(5, 300 + seed)?;
        for (i, j) in [(1, 2), (2, 4), (3, 5)] {
            let fast = concurrence(&reduce_to_pair(&psi, i, j)?)?.value;
            let slow = oracle::concurrence(&oracle::dense_pair(psi.amplitudes(), i, j))?;
            err = err.max((fast - slow).abs());
        }
    }
    Ok(Check::new("concurrence vs Schur oracle", err, 1e-9))
}

/// Pure, maximally mixed and complementary-bipartition entropies.
pub fn entropy_check() -> Result<Check> {
    let mut err: f64 = 0.0;
    let pure = reduce_to_block(&momentum_eigenstate(6, 9)?, &[1, 2, 3])?;
    err = err.max(von_neumann_entropy(&pure).abs());
    let half = DensityMatrix::new(DMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, 0.0)), vec![1])?;
    err = err.max((von_neumann_entropy(&half) - 1.0).abs());
    for seed in 0..20 {
        let psi = random_state(8, 400 + seed)?;
        let a: Vec<usize> = (1..=3).collect();
        let b: Vec<usize> = (4..=8).collect();
        let sa = von_neumann_entropy(&reduce_to_block(&psi, &a)?);
        let sb = von_neumann_entropy(&reduce_to_block(&psi, &b)?);
        err = err.max((sa - sb).abs());
        err = err.max((block_entropy(&psi, &b)? - sb).abs());
    }
    Ok(Check::new("entropy identities", err, 1e-9))
}

/// Norm drift over 2000 Floquet steps at ten qubits.
pub fn unitarity_check() -> Result<Check> {
    let params = MapParams::new(10, std::f64::consts::SQRT_2, 300)?;
    let op = FloquetOperator::new(&params);
    let mut psi = momentum_eigenstate(10, 0)?;
    let mut err: f64 = 0.0;
    for _ in 0..2000 {
        op.apply(&mut psi)?;
        err = err.max((psi.norm_sqr() - 1.0).abs());
    }
    Ok(Check::new("norm drift, 2000 steps", err, 1e-9))
}

pub fn run() -> Result<Vec<Check>> {
    Ok(vec![
        dft_check()?,
        partial_trace_check()?,
        concurrence_check()?,
        entropy_check()?,
        unitarity_check()?,
    ])
}
