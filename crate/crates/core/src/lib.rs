//! Statevector simulation of the quantum sawtooth map with entanglement diagnostics.
//!
//! The Floquet operator `U = exp(ik(θ-π)²) exp(-iTn²/2)` is applied by the
//! split-operator method on `N = 2^n_q` momentum states. On top of the
//! evolution kernel the crate provides pairwise concurrence, block Von Neumann
//! entropy, a localization-length estimator, scaling fits and a scenario
//! harness that writes CSV datasets.
//!
//! ```
//! use qsm_core::{dynamics::{FloquetOperator, MapParams}, entanglement, statevec};
//!
//! let params = MapParams::new(8, 2f64.sqrt(), 300).unwrap();
//! let op = FloquetOperator::new(&params);
//! let mut psi = statevec::momentum_eigenstate(8, 0).unwrap();
//! for _ in 0..50 {
//!     op.apply(&mut psi).unwrap();
//! }
//! let c = entanglement::concurrence_of_pair(&psi, 1, 3).unwrap();
//! assert!((0.0..=1.0).contains(&c));
//! ```

// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod fft;
pub mod harness;
pub mod oracle;
pub mod statevec;

pub use error::{Error, Result};
pub use exec::Execution;
