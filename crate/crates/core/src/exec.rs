//! Sequential or rayon-backed execution of data-parallel kernels.
//!
//! Every kernel computes each output element with the same arithmetic
//! regardless of the split, so both modes give bitwise-identical results.

/// Vectors shorter than this stay on one thread even in parallel mode.
pub const PARALLEL_MIN_LEN: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is on, otherwise runs sequentially.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when a kernel over `len` elements should fan out.
    pub fn fan_out(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel && len >= PARALLEL_MIN_LEN
    }
}

/// Elementwise `a[i] *= b[i]`.
pub(crate) fn mul_assign(exec: Execution, a: &mut [num_complex::Complex64], b: &[num_complex::Complex64]) {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if exec.fan_out(a.len()) {
        use rayon::prelude::*;
        a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x *= *y);
        return;
    }
    let _ = exec;
    a.iter_mut().zip(b).for_each(|(x, y)| *x *= *y);
}
