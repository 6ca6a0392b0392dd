use nalgebra::DMatrix;

use super::apply::LocalLayout;
use super::operator::Operator;
use super::register::QubitRegister;
use super::state::{check_op_targets, PureState};
use super::{c, C};
use crate::error::{Error, Result};
use crate::noise::Channel;

/// A dense density matrix over a qubit register.
///
/// Post-selected branches are carried unnormalized; `trace()` then gives the
/// branch probability.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    register: QubitRegister,
    matrix: DMatrix<C>,
}

impl DensityMatrix {
    pub fn from_matrix(register: QubitRegister, matrix: DMatrix<C>) -> Result<Self> {
        let dim = register.dim();
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self { register, matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = state.amplitudes();
        Self {
            register: state.register().clone(),
            matrix: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(register: QubitRegister) -> Self {
        let dim = register.dim();
        Self {
            register,
            matrix: DMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    pub fn num_qubits(&self) -> usize {
        self.register.count()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.norm_squared()
    }

    /// Divides by the trace, returning the trace that was removed.
    pub fn normalize(&mut self) -> Result<f64> {
        let t = self.trace();
        if t <= f64::MIN_POSITIVE {
            return Err(Error::ZeroProbabilityBranch { probability: t });
        }
        self.matrix.unscale_mut(t);
        Ok(t)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Max-norm of `rho - rho^dag`.
    pub fn hermiticity_deviation(&self) -> f64 {
        super::operator::max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()).unscale(2.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `rho -> A rho A^dag` with `op` acting on `targets`. `A` need not be
    /// unitary, which makes this the projection step of a post-selection too.
    pub fn apply_operator(&self, op: &Operator, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_operator_in_place(op, targets)?;
        Ok(out)
    }

    pub fn apply_operator_in_place(&mut self, op: &Operator, targets: &[usize]) -> Result<()> {
        check_op_targets(&self.register, op, targets)?;
        let layout = LocalLayout::new(self.num_qubits(), targets);
        sandwich(&mut self.matrix, &layout, op.matrix());
        Ok(())
    }

    /// `rho -> sum_k K rho K^dag` with the channel acting on `targets`.
    pub fn apply_channel(&self, channel: &Channel, targets: &[usize]) -> Result<Self> {
        if channel.arity() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: channel.arity(),
                found: targets.len(),
            });
        }
        self.register.check_targets(targets)?;
        let layout = LocalLayout::new(self.num_qubits(), targets);
        let dim = self.dim();
        let mut acc = DMatrix::zeros(dim, dim);
        for k in channel.kraus() {
            let mut term = self.matrix.clone();
            sandwich(&mut term, &layout, k.matrix());
            acc += term;
        }
        Ok(Self {
            register: self.register.clone(),
            matrix: acc,
        })
    }

    /// Reduced density matrix over `keep`, whose qubits appear in the given order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::invalid("keep", "at least one qubit must be kept"));
        }
        self.register.check_targets(keep)?;
        let n = self.num_qubits();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let spread = |qubits: &[usize], local: usize| -> usize {
            let k = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                .map(|(_, &q)| self.register.bit(q))
                .sum()
        };
        let kept_idx: Vec<usize> = (0..1usize << keep.len()).map(|i| spread(keep, i)).collect();
        let traced_idx: Vec<usize> = (0..1usize << traced.len())
            .map(|i| spread(&traced, i))
            .collect();
        let dk = kept_idx.len();
        let matrix = DMatrix::from_fn(dk, dk, |i, j| {
            traced_idx
                .iter()
                .map(|&t| self.matrix[(kept_idx[i] | t, kept_idx[j] | t)])
                .sum()
        });
        Ok(Self {
            register: self.register.select(keep)?,
            matrix,
        })
    }

    /// `self (x) other`, with `other`'s qubits appended after ours.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            register: self.register.concat(&other.register)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Contracts qubit `qubit` on both sides with `<bra| . |bra>`, removing it.
    /// The trace of the result is the probability of finding it in `|bra>`.
    pub fn contract_qubit(&self, qubit: usize, bra: [C; 2]) -> Result<Self> {
        self.register.check_targets(&[qubit])?;
        let n = self.num_qubits();
        if n == 1 {
            return Err(Error::EmptyRegister);
        }
        let keep: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
        let bit = self.register.bit(qubit);
        let pos = n - 1 - qubit;
        let d = 1usize << (n - 1);
        let matrix = DMatrix::from_fn(d, d, |i, j| {
            let (i0, j0) = (
                super::state::insert_zero_bit(i, pos),
                super::state::insert_zero_bit(j, pos),
            );
            let mut acc = c(0.0, 0.0);
            for (a, ba) in [(0, bra[0]), (bit, bra[1])] {
                for (b, bb) in [(0, bra[0]), (bit, bra[1])] {
                    acc += ba.conj() * self.matrix[(i0 | a, j0 | b)] * bb;
                }
            }
            acc
        });
        Ok(Self {
            register: self.register.select(&keep)?,
            matrix,
        })
    }

    pub fn add(&self, other: &DensityMatrix) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            register: self.register.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// `<psi| rho |psi>`.
    pub fn expectation_in(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}

/// In-place `M -> A M A^dag` using the strided kernel on columns then rows.
fn sandwich(m: &mut DMatrix<C>, layout: &LocalLayout, op: &DMatrix<C>) {
    let d = m.nrows();
    let buf = m.as_mut_slice();
    let mut scratch = Vec::new();
    // column-major: column j is contiguous at offset j*d
    for j in 0..d {
        layout.apply(buf, j * d, 1, op, false, &mut scratch);
    }
    // row i lives at offset i with stride d; right-multiplying by A^dag acts as conj(A) on rows
    for i in 0..d {
        layout.apply(buf, i, d, op, true, &mut scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::operator::Pauli;
    use crate::noise::Channel;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn reg(n: usize) -> QubitRegister {
        QubitRegister::system(n).unwrap()
    }

    fn plus() -> PureState {
        let h = c(FRAC_1_SQRT_2, 0.0);
        PureState::from_amplitudes(reg(1), vec![h, h]).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = DensityMatrix::from_pure(&plus());
        let out = rho.apply_channel(&Channel::identity(1), &[0]).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn full_dephasing_kills_coherences() {
        let p0 = Operator::projector(&[c(1.0, 0.0), c(0.0, 0.0)], "P0").unwrap();
        let p1 = Operator::projector(&[c(0.0, 0.0), c(1.0, 0.0)], "P1").unwrap();
        let ch = Channel::new(vec![p0, p1], "dephase").unwrap();
        let out = DensityMatrix::from_pure(&plus()).apply_channel(&ch, &[0]).unwrap();
        let half = DensityMatrix::maximally_mixed(reg(1));
        assert!(super::super::operator::max_abs_diff(out.matrix(), half.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let s = PureState::from_label(reg(2), "01").unwrap();
        let rho = DensityMatrix::from_pure(&s).partial_trace(&[0]).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho.trace(), 1.0);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = c(0.0, 0.0);
        let bell = PureState::from_amplitudes(reg(2), vec![h, z, z, h]).unwrap();
        let rho = DensityMatrix::from_pure(&bell);
        for keep in [[0], [1]] {
            let red = rho.partial_trace(&keep).unwrap();
            let half = DensityMatrix::maximally_mixed(reg(1));
            assert!(super::super::operator::max_abs_diff(red.matrix(), half.matrix()) < 1e-15);
        }
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let s = PureState::from_label(reg(3), "100").unwrap();
        let rho = DensityMatrix::from_pure(&s);
        let swapped = rho.partial_trace(&[1, 0]).unwrap();
        // qubit order (1, 0) turns |10> into |01>
        assert_eq!(swapped.matrix()[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn operator_matches_state_route() {
        let s = PureState::from_label(reg(3), "101").unwrap();
        let op = Operator::tilde().kron(&Operator::pauli(Pauli::Y));
        let via_state = DensityMatrix::from_pure(&s.apply(&op, &[2, 0]).unwrap());
        let via_rho = DensityMatrix::from_pure(&s).apply_operator(&op, &[2, 0]).unwrap();
        assert!(super::super::operator::max_abs_diff(via_state.matrix(), via_rho.matrix()) < 1e-15);
    }

    #[test]
    fn contract_matches_projection_and_trace() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = c(0.0, 0.0);
        let bell = PureState::from_amplitudes(reg(2), vec![h, z, z, h]).unwrap();
        let rho = DensityMatrix::from_pure(&bell);
        let branch = rho.contract_qubit(1, [c(1.0, 0.0), z]).unwrap();
        assert!((branch.trace() - 0.5).abs() < 1e-15);
        assert!((branch.matrix()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn min_eigenvalue_of_pure_state() {
        let rho = DensityMatrix::from_pure(&plus());
        assert!(rho.min_eigenvalue().abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }
}
