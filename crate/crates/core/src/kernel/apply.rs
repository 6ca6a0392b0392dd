//! Strided application of a local operator to one amplitude vector embedded
//! in a larger buffer. State vectors use stride 1; density matrices reuse the
//! same routine on their columns (left action) and rows (right action).

use nalgebra::DMatrix;

use super::C;

/// Precomputed index layout for applying a `k`-qubit operator inside an
/// `n`-qubit register.
pub(crate) struct LocalLayout {
    /// Offsets of the `2^k` local basis states relative to a base index.
    offsets: Vec<usize>,
    /// Base indices: every full index whose target bits are all zero.
    bases: Vec<usize>,
}

impl LocalLayout {
    pub(crate) fn new(n: usize, targets: &[usize]) -> Self {
        let k = targets.len();
        let bit = |q: usize| 1usize << (n - 1 - q);
        let mask: usize = targets.iter().map(|&t| bit(t)).sum();
        let offsets = (0..1usize << k)
            .map(|local| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                    .map(|(_, &t)| bit(t))
                    .sum()
            })
            .collect();
        let bases = (0..1usize << n).filter(|i| i & mask == 0).collect();
        Self { offsets, bases }
    }

    /// Applies `op` (or its elementwise conjugate) to the vector whose basis
    /// element `b` lives at `buf[offset + b * stride]`.
    pub(crate) fn apply(
        &self,
        buf: &mut [C],
        offset: usize,
        stride: usize,
        op: &DMatrix<C>,
        conj: bool,
        scratch: &mut Vec<C>,
    ) {
        let d = self.offsets.len();
        scratch.resize(d, C::new(0.0, 0.0));
        for &base in &self.bases {
            for (s, &o) in scratch.iter_mut().zip(&self.offsets) {
                *s = buf[offset + (base + o) * stride];
            }
            for r in 0..d {
                let mut acc = C::new(0.0, 0.0);
                for (col, s) in scratch.iter().enumerate() {
                    let m = op[(r, col)];
                    acc += if conj { m.conj() } else { m } * s;
                }
                buf[offset + (base + self.offsets[r]) * stride] = acc;
            }
        }
    }
}
