//! In-place iterative radix-2 transform with bit-reversal permutation.
//!
//! `Direction::MomentumToAngle` evaluates `Σ_s x_s e^{+2πi js/N}` and
//! `Direction::AngleToMomentum` the conjugate kernel. The raw butterflies are
//! unnormalized; [`Dft::forward`] and [`Dft::inverse`] apply the unitary
//! `1/√N` factor.

use num_complex::Complex64;

use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MomentumToAngle,
    AngleToMomentum,
}

/// Twiddle and permutation tables for one transform length.
#[derive(Debug, Clone)]
pub struct Dft {
    len: usize,
    log2: u32,
    // e^{+2πik/N} for k in 0..N/2
    twiddles: Vec<Complex64>,
}

impl Dft {
    pub fn new(len: usize) -> Self {
        assert!(
            len.is_power_of_two() && len >= 2,
            "transform length must be a power of two >= 2"
        );
        let half = len / 2;
        let twiddles = (0..half)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / len as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Self {
            len,
            log2: len.trailing_zeros(),
            twiddles,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unitary momentum-to-angle transform.
    pub fn forward(&self, data: &mut [Complex64], exec: Execution) {
        self.transform_unscaled(data, Direction::MomentumToAngle, exec);
        self.scale(data, exec);
    }

    /// Unitary angle-to-momentum transform, the exact inverse of [`Dft::forward`].
    pub fn inverse(&self, data: &mut [Complex64], exec: Execution) {
        self.transform_unscaled(data, Direction::AngleToMomentum, exec);
        self.scale(data, exec);
    }

    fn scale(&self, data: &mut [Complex64], exec: Execution) {
        let s = 1.0 / (self.len as f64).sqrt();
        #[cfg(feature = "parallel")]
        if exec.fan_out(data.len()) {
            use rayon::prelude::*;
            data.par_iter_mut().for_each(|x| *x *= s);
            return;
        }
        let _ = exec;
        data.iter_mut().for_each(|x| *x *= s);
    }

    /// Butterflies without normalization. The Floquet kernel folds the
    /// `1/N` of a forward/inverse pair into its kick table instead.
    pub fn transform_unscaled(&self, data: &mut [Complex64], dir: Direction, exec: Execution) {
        assert_eq!(data.len(), self.len, "transform length mismatch");
        self.bit_reverse(data);
        let conj = dir == Direction::AngleToMomentum;
        let mut half = 1usize;
        while half < self.len {
            let span = half * 2;
            let stride = self.len / span;
            self.stage(data, half, stride, conj, exec);
            half = span;
        }
    }

    fn bit_reverse(&self, data: &mut [Complex64]) {
        let shift = usize::BITS - self.log2;
        for i in 0..self.len {
            let j = i.reverse_bits() >> shift;
            if i < j {
                data.swap(i, j);
            }
        }
    }

    fn stage(&self, data: &mut [Complex64], half: usize, stride: usize, conj: bool, exec: Execution) {
        let tw = &self.twiddles;
        let block = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                butterfly(a, b, twiddle(tw, k * stride, conj));
            }
        };

        #[cfg(feature = "parallel")]
        if exec.fan_out(data.len()) {
            use rayon::prelude::*;
            let span = half * 2;
            if self.len / span >= 64 {
                data.par_chunks_mut(span).for_each(block);
            } else {
                for chunk in data.chunks_mut(span) {
                    let (lo, hi) = chunk.split_at_mut(half);
                    lo.par_iter_mut()
                        .zip(hi.par_iter_mut())
                        .enumerate()
                        .for_each(|(k, (a, b))| butterfly(a, b, twiddle(tw, k * stride, conj)));
                }
            }
            return;
        }
        let _ = exec;
        data.chunks_mut(half * 2).for_each(block);
    }
}

#[inline(always)]
fn twiddle(tw: &[Complex64], idx: usize, conj: bool) -> Complex64 {
    let w = tw[idx];
    if conj {
        w.conj()
    } else {
        w
    }
}

#[inline(always)]
fn butterfly(a: &mut Complex64, b: &mut Complex64, w: Complex64) {
    let t = *b * w;
    let u = *a;
    *a = u + t;
    *b = u - t;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn sample(len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|i| {
                let x = i as f64;
                Complex64::new((0.37 * x).sin() + 0.1, (1.3 * x * x).cos())
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        for log2 in 1..=7 {
            let len = 1 << log2;
            let input = sample(len);
            for (dir, sign) in [(Direction::MomentumToAngle, 1.0), (Direction::AngleToMomentum, -1.0)] {
                let mut fast = input.clone();
                Dft::new(len).transform_unscaled(&mut fast, dir, Execution::Sequential);
                let slow = oracle::direct_dft(&input, sign);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-10 * len as f64, "len {len}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn delta_goes_to_flat() {
        let len = 16;
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[0] = Complex64::new(1.0, 0.0);
        Dft::new(len).forward(&mut v, Execution::Sequential);
        for x in &v {
            assert!((x - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn parallel_is_bitwise_sequential() {
        let len = 1 << 15;
        let input = sample(len);
        let dft = Dft::new(len);
        let mut a = input.clone();
        let mut b = input;
        dft.forward(&mut a, Execution::Sequential);
        dft.forward(&mut b, Execution::Parallel);
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }
}
