use nalgebra::DVector;

use super::apply::LocalLayout;
use super::operator::Operator;
use super::register::{QubitRegister, Role};
use super::{c, C};
use crate::error::{Error, Result};

/// A dense state vector over a qubit register.
///
/// Unitary operations keep the norm at one; projections used for
/// post-selection may leave it unnormalized until [`PureState::normalize`]
/// is called.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    register: QubitRegister,
    amplitudes: DVector<C>,
}

impl PureState {
    pub fn from_amplitudes(register: QubitRegister, amplitudes: Vec<C>) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            register,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(register: QubitRegister, index: usize) -> Result<Self> {
        let dim = register.dim();
        if index >= dim {
            return Err(Error::invalid(
                "basis index",
                format!("{index} >= dimension {dim}"),
            ));
        }
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[index] = c(1.0, 0.0);
        Self::from_amplitudes(register, amps)
    }

    /// Basis state from a bit label such as `"0110"` (qubit 0 first).
    pub fn from_label(register: QubitRegister, label: &str) -> Result<Self> {
        if label.len() != register.count() {
            return Err(Error::DimensionMismatch {
                expected: register.count(),
                found: label.len(),
            });
        }
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::invalid("basis label", format!("`{label}` is not binary")))?;
        Self::basis(register, index)
    }

    /// Single-qubit state `a|0> + b|1>` with the given role.
    pub fn qubit(a: C, b: C, role: Role) -> Self {
        Self {
            register: QubitRegister::new(vec![role]).expect("one qubit fits"),
            amplitudes: DVector::from_vec(vec![a, b]),
        }
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    pub fn num_qubits(&self) -> usize {
        self.register.count()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if n2 <= f64::MIN_POSITIVE {
            return Err(Error::ZeroProbabilityBranch { probability: n2 });
        }
        self.amplitudes.unscale_mut(n2.sqrt());
        Ok(n2)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scaled(mut self, factor: C) -> Self {
        self.amplitudes *= factor;
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C> {
        self.check_same_dim(other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Linear combination `self + factor * other`.
    pub fn add_scaled(&self, factor: C, other: &PureState) -> Result<Self> {
        self.check_same_dim(other.dim())?;
        Ok(Self {
            register: self.register.clone(),
            amplitudes: &self.amplitudes + &other.amplitudes * factor,
        })
    }

    /// Returns the state with `op` applied on `targets` and identity elsewhere.
    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(op, targets)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, op: &Operator, targets: &[usize]) -> Result<()> {
        check_op_targets(&self.register, op, targets)?;
        let layout = LocalLayout::new(self.num_qubits(), targets);
        let mut scratch = Vec::new();
        layout.apply(
            self.amplitudes.as_mut_slice(),
            0,
            1,
            op.matrix(),
            false,
            &mut scratch,
        );
        Ok(())
    }

    /// `self (x) other`, with `other`'s qubits appended after ours.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        Ok(Self {
            register: self.register.concat(&other.register)?,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// Contracts qubit `qubit` with the bra `<bra|`, removing it from the
    /// register. The result is unnormalized: its squared norm is the
    /// probability of finding `qubit` in `|bra>`.
    pub fn contract_qubit(&self, qubit: usize, bra: [C; 2]) -> Result<Self> {
        self.register.check_targets(&[qubit])?;
        let n = self.num_qubits();
        if n == 1 {
            return Err(Error::EmptyRegister);
        }
        let keep: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
        let register = self.register.select(&keep)?;
        let bit = self.register.bit(qubit);
        let amps = (0..1usize << (n - 1))
            .map(|i| {
                let full0 = insert_zero_bit(i, n - 1 - qubit);
                bra[0].conj() * self.amplitudes[full0] + bra[1].conj() * self.amplitudes[full0 | bit]
            })
            .collect();
        Self::from_amplitudes(register, amps)
    }

    fn check_same_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Inserts a zero bit at position `pos` (counted from the least significant end).
#[inline]
pub(crate) fn insert_zero_bit(i: usize, pos: usize) -> usize {
    let low = i & ((1 << pos) - 1);
    ((i >> pos) << (pos + 1)) | low
}

pub(crate) fn check_op_targets(reg: &QubitRegister, op: &Operator, targets: &[usize]) -> Result<()> {
    if op.arity() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: op.arity(),
            found: targets.len(),
        });
    }
    reg.check_targets(targets)
}
