use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{c, C, UNITARY_TOL};
use crate::error::{Error, Result};

/// Single-qubit Pauli errors: flip, sign change, and both together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DMatrix<C> {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        match self {
            Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// A dense operator on `arity` qubits, stored as a `2^arity x 2^arity` matrix.
///
/// The first target a caller passes alongside the operator is its most
/// significant local qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    arity: usize,
    matrix: DMatrix<C>,
    label: String,
}

impl Operator {
    pub fn new(matrix: DMatrix<C>, label: impl Into<String>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if !rows.is_power_of_two() || rows < 2 {
            return Err(Error::invalid(
                "operator",
                format!("dimension {rows} is not a power of two"),
            ));
        }
        Ok(Self {
            arity: rows.trailing_zeros() as usize,
            matrix,
            label: label.into(),
        })
    }

    /// Like [`Operator::new`], but rejects matrices that are not unitary within 1e-10.
    pub fn unitary(matrix: DMatrix<C>, label: impl Into<String>) -> Result<Self> {
        let op = Self::new(matrix, label)?;
        let deviation = op.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary {
                label: op.label,
                deviation,
            });
        }
        Ok(op)
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            matrix: DMatrix::identity(1 << arity, 1 << arity),
            label: "I".into(),
        }
    }

    pub fn pauli(p: Pauli) -> Self {
        Self {
            arity: 1,
            matrix: p.matrix(),
            label: p.to_string(),
        }
    }

    /// The change of basis taking |0>, |1> to the tilde states
    /// |~0> = (|0> + |1>)/sqrt2 and |~1> = (|0> - |1>)/sqrt2.
    pub fn tilde() -> Self {
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            arity: 1,
            matrix: DMatrix::from_row_slice(2, 2, &[h, h, h, -h]),
            label: "H~".into(),
        }
    }

    /// Controlled NOT, control first.
    pub fn cnot() -> Self {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 3)] = c(1.0, 0.0);
        m[(3, 2)] = c(1.0, 0.0);
        Self {
            arity: 2,
            matrix: m,
            label: "CNOT".into(),
        }
    }

    /// Rank-one projector `|v><v|` for a normalized vector `v`.
    pub fn projector(v: &[C], label: impl Into<String>) -> Result<Self> {
        let n = v.len();
        let m = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self::new(m, label)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn adjoint(&self) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.adjoint(),
            label: format!("{}^dag", self.label),
        }
    }

    /// Tensor product with `self` on the leading qubits.
    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            arity: self.arity + other.arity,
            matrix: self.matrix.kronecker(&other.matrix),
            label: format!("{}(x){}", self.label, other.label),
        }
    }

    /// Operator product `self * other` (apply `other` first).
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            arity: self.arity,
            matrix: &self.matrix * &other.matrix,
            label: format!("{}*{}", self.label, other.label),
        })
    }

    /// Max-norm of `U^dag U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        max_abs_diff(&prod, &DMatrix::identity(self.dim(), self.dim()))
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for op in [
            Operator::pauli(Pauli::X),
            Operator::pauli(Pauli::Y),
            Operator::pauli(Pauli::Z),
            Operator::tilde(),
            Operator::cnot(),
        ] {
            assert!(op.unitarity_deviation() < 1e-15, "{}", op.label());
        }
    }

    #[test]
    fn y_is_flip_with_sign_change_up_to_phase() {
        let xz = Pauli::X.matrix() * Pauli::Z.matrix();
        let y = Pauli::Y.matrix();
        // Y = i X Z
        let ixz = xz.map(|v| v * c(0.0, 1.0));
        assert!(max_abs_diff(&ixz, &y) < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_and_bad_shapes() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(
            Operator::unitary(m, "ones"),
            Err(Error::NotUnitary { .. })
        ));
        assert!(Operator::new(DMatrix::zeros(3, 3), "bad").is_err());
        assert!(Operator::new(DMatrix::zeros(2, 4), "bad").is_err());
    }

    #[test]
    fn kron_orders_first_operand_most_significant() {
        let xi = Operator::pauli(Pauli::X).kron(&Operator::identity(1));
        // |00> -> |10>
        assert_eq!(xi.matrix()[(2, 0)], c(1.0, 0.0));
        assert_eq!(xi.arity(), 2);
    }
}
