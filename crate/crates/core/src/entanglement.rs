//! Reduced density matrices, Wootters concurrence and Von Neumann entropy.
//!
//! Pair states use the basis `(00, 01, 10, 11)` with qubit `i` as the leading
//! symbol, so the local index is `2α_i + α_j`. Block states use block-local
//! binary coding with the first listed qubit least significant. The two
//! orderings differ by swapping `01` and `10` for a two-qubit block.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{Basis, StateVector};

/// Spectral floor below which negative eigenvalues count as rounding noise.
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Eigenvalues below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Eigenvalues of unit-trace 4x4 matrices below this are roundoff and count
/// as zero inside the concurrence kernel. Without it a rank-deficient `ρ`
/// picks up `λ ~ 1e-8` from `√(1e-17)`.
pub const RANK_CUTOFF: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    qubits: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity up to [`EIGEN_FLOOR`].
    pub fn new(entries: DMatrix<Complex64>, qubits: Vec<usize>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || dim != 1 << qubits.len() {
            return Err(Error::Argument(format!(
                "{}x{} matrix does not match {} qubits",
                entries.nrows(),
                entries.ncols(),
                qubits.len()
            )));
        }
        let rho = Self { entries, qubits };
        for r in 0..dim {
            for c in 0..=r {
                let d = rho.entries[(r, c)] - rho.entries[(c, r)].conj();
                if d.norm() > EIGEN_FLOOR {
                    return Err(Error::Domain(format!("not Hermitian at ({r}, {c})")));
                }
            }
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > EIGEN_FLOOR {
            return Err(Error::Domain(format!("trace {tr} differs from 1")));
        }
        if let Some(min) = rho.eigenvalues().first() {
            if *min < -EIGEN_FLOOR {
                return Err(Error::Domain(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_eigen(&self.entries).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn hermitian_eigen(m: &DMatrix<Complex64>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    // symmetrize so rounding asymmetry does not leak into the solver
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
}

fn check_label(label: usize, n_q: usize) -> Result<()> {
    if label == 0 || label > n_q {
        return Err(Error::Argument(format!("qubit label {label} outside 1..={n_q}")));
    }
    Ok(())
}

fn check_block(qubits: &[usize], n_q: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::Argument("block must contain at least one qubit".into()));
    }
    for &q in qubits {
        check_label(q, n_q)?;
    }
    if qubits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument(format!(
            "block labels must be distinct and ascending, got {qubits:?}"
        )));
    }
    if qubits.len() == n_q {
        return Err(Error::Domain("degenerate trace: block covers every qubit".into()));
    }
    Ok(())
}

/// Two-qubit reduced state of qubits `i < j`, computed in `O(N)`.
pub fn reduce_to_pair(psi: &StateVector, i: usize, j: usize) -> Result<DensityMatrix> {
    psi.require_basis(Basis::Momentum)?;
    let n_q = psi.n_q();
    check_label(i, n_q)?;
    check_label(j, n_q)?;
    if i >= j {
        return Err(Error::Argument(format!(
            "pair labels must satisfy i < j, got ({i}, {j})"
        )));
    }
    let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
    let offsets = [0, bj, bi, bi | bj];
    let amps = psi.amplitudes();
    let mut acc = [[ZERO; 4]; 4];
    for base in 0..amps.len() {
        if base & (bi | bj) != 0 {
            continue;
        }
        let a = offsets.map(|o| amps[base | o]);
        for l in 0..4 {
            for m in l..4 {
                acc[l][m] += a[l] * a[m].conj();
            }
        }
    }
    let entries = DMatrix::from_fn(4, 4, |r, c| if r <= c { acc[r][c] } else { acc[c][r].conj() });
    Ok(DensityMatrix {
        entries,
        qubits: vec![i, j],
    })
}

/// Reduced state of an ascending block of `m < n_q` qubits in `O(N·2^m)`.
pub fn reduce_to_block(psi: &StateVector, qubits: &[usize]) -> Result<DensityMatrix> {
    psi.require_basis(Basis::Momentum)?;
    check_block(qubits, psi.n_q())?;
    let dim = 1usize << qubits.len();
    let mask: usize = qubits.iter().map(|q| 1usize << (q - 1)).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|l| {
            qubits
                .iter()
                .enumerate()
                .filter(|(k, _)| (l >> k) & 1 == 1)
                .map(|(_, q)| 1usize << (q - 1))
                .sum()
        })
        .collect();
    let amps = psi.amplitudes();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    let mut v = vec![ZERO; dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (x, o) in v.iter_mut().zip(&offsets) {
            *x = amps[base | o];
        }
        if v.iter().all(|x| *x == ZERO) {
            continue;
        }
        for c in 0..dim {
            let vc = v[c].conj();
            for r in 0..=c {
                acc[(r, c)] += v[r] * vc;
            }
        }
    }
    for c in 0..dim {
        for r in c + 1..dim {
            acc[(r, c)] = acc[(c, r)].conj();
        }
    }
    Ok(DensityMatrix {
        entries: acc,
        qubits: qubits.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
}

/// Wootters concurrence of a two-qubit state.
///
/// The spectrum of `ρρ̃` is taken from the Hermitian matrix `√ρ ρ̃ √ρ`, which
/// has the same eigenvalues. Eigenvalues below `-1e-10` are reported as
/// numerical degradation instead of being clamped; those under
/// [`RANK_CUTOFF`] in magnitude are treated as exact zeros.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    if rho.dim() != 4 {
        return Err(Error::Argument(format!(
            "concurrence needs a 4x4 state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    let eig = hermitian_eigen(&rho.entries);
    let mut roots = Vec::with_capacity(4);
    for &ev in eig.eigenvalues.iter() {
        if ev < -EIGEN_FLOOR {
            return Err(Error::Numerical(format!(
                "density matrix eigenvalue {ev:e} below floor"
            )));
        }
        roots.push(Complex64::new(if ev > RANK_CUTOFF { ev.sqrt() } else { 0.0 }, 0.0));
    }
    let v = &eig.eigenvectors;
    let sqrt_rho = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots)) * v.adjoint();
    let tilde = spin_flip(&rho.entries);
    let h = &sqrt_rho * tilde * &sqrt_rho;
    let mu = hermitian_eigen(&h).eigenvalues;

    let mut lambdas = [0.0; 4];
    for (l, &m) in lambdas.iter_mut().zip(mu.iter()) {
        if m < -EIGEN_FLOOR {
            return Err(Error::Numerical(format!("√ρ ρ̃ √ρ eigenvalue {m:e} below floor")));
        }
        *l = if m > RANK_CUTOFF { m.sqrt() } else { 0.0 };
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceResult { value, lambdas })
}

/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// `σ_y⊗σ_y` is the anti-diagonal with signs `(-1, 1, 1, -1)`, so the
/// conjugation reverses both indices and flips the sign when exactly one of
/// them lies in `{00, 11}`.
fn spin_flip(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sign = |k: usize| if k == 0 || k == 3 { -1.0 } else { 1.0 };
    DMatrix::from_fn(4, 4, |r, c| rho[(3 - r, 3 - c)].conj() * (sign(r) * sign(c)))
}

/// `-Σ λ log₂ λ` over eigenvalues above [`ENTROPY_CUTOFF`].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l >= ENTROPY_CUTOFF)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}

pub fn concurrence_of_pair(psi: &StateVector, i: usize, j: usize) -> Result<f64> {
    Ok(concurrence(&reduce_to_pair(psi, i, j)?)?.value)
}

/// Entropy of a block of a pure state, evaluated on whichever side of the
/// bipartition is smaller.
pub fn block_entropy(psi: &StateVector, qubits: &[usize]) -> Result<f64> {
    let n_q = psi.n_q();
    check_block(qubits, n_q)?;
    if qubits.len() * 2 > n_q {
        let complement: Vec<usize> = (1..=n_q).filter(|q| !qubits.contains(q)).collect();
        return Ok(von_neumann_entropy(&reduce_to_block(psi, &complement)?));
    }
    Ok(von_neumann_entropy(&reduce_to_block(psi, qubits)?))
}
