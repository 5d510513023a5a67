//! Slow reference implementations used to cross-check the fast kernels.
//!
//! Nothing here shares code with the production paths: the transform is a
//! direct `O(N²)` sum, the partial trace materializes the full projector
//! `|ψ⟩⟨ψ|`, and concurrence comes from the non-Hermitian spectrum of `ρρ̃`
//! through a complex Schur decomposition.

use nalgebra::{DMatrix, Matrix4, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `out_j = Σ_s x_s e^{sign·2πi js/N}`, unnormalized.
pub fn direct_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(s, a)| {
                    // reduce js mod N first so the angle stays small
                    let phase = sign * std::f64::consts::TAU * ((j * s) % n) as f64 / n as f64;
                    a * Complex64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

/// Reduced state on `keep` from the dense `N×N` projector.
///
/// Local index is `Σ_k α_{keep[k]} 2^k`, so the first listed label is the
/// least significant bit. Pass `[j, i]` to get the pair ordering with qubit
/// `i` as the leading symbol.
pub fn dense_partial_trace(amps: &[Complex64], keep: &[usize]) -> DMatrix<Complex64> {
    let n = amps.len();
    let n_q = n.trailing_zeros() as usize;
    let full = DMatrix::from_fn(n, n, |r, c| amps[r] * amps[c].conj());
    let bit = |s: usize, label: usize| (s >> (label - 1)) & 1;
    let local = |s: usize| keep.iter().enumerate().map(|(k, &q)| bit(s, q) << k).sum::<usize>();
    let traced: Vec<usize> = (1..=n_q).filter(|q| !keep.contains(q)).collect();
    let same_env = |r: usize, c: usize| traced.iter().all(|&q| bit(r, q) == bit(c, q));

    let d = 1 << keep.len();
    let mut rho = DMatrix::zeros(d, d);
    for r in 0..n {
        for c in 0..n {
            if same_env(r, c) {
                rho[(local(r), local(c))] += full[(r, c)];
            }
        }
    }
    rho
}

/// Pair state in the `(00, 01, 10, 11)` basis with qubit `i` leading.
pub fn dense_pair(amps: &[Complex64], i: usize, j: usize) -> Matrix4<Complex64> {
    let m = dense_partial_trace(amps, &[j, i]);
    Matrix4::from_fn(|r, c| m[(r, c)])
}

/// `σ_y ⊗ σ_y` written out entry by entry.
pub fn sigma_yy() -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        z, z, z, -p,
        z, z, p, z,
        z, p, z, z,
        -p, z, z, z,
    );
    m
}

/// Square roots of the eigenvalues of `ρρ̃`, descending.
pub fn concurrence_lambdas(rho: &Matrix4<Complex64>) -> Result<[f64; 4]> {
    let yy = sigma_yy();
    let tilde = yy * rho.conjugate() * yy;
    let r = rho * tilde;
    let schur =
        Schur::try_new(r, 1e-15, 10_000).ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut lambdas = [0.0; 4];
    for (k, l) in lambdas.iter_mut().enumerate() {
        let mu = t[(k, k)];
        if mu.re < -1e-9 || mu.im.abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "ρρ̃ eigenvalue {mu} is not a non-negative real"
            )));
        }
        *l = mu.re.max(0.0).sqrt();
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

pub fn concurrence(rho: &Matrix4<Complex64>) -> Result<f64> {
    let l = concurrence_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// `p|Φ⁺⟩⟨Φ⁺| + (1-p) I/4`.
pub fn werner(p: f64) -> Matrix4<Complex64> {
    let mut m = Matrix4::identity() * Complex64::new((1.0 - p) / 4.0, 0.0);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, c)] += Complex64::new(p / 2.0, 0.0);
    }
    m
}
