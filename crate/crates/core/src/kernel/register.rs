use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense kernels accept unless a caller raises the limit.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// What a qubit stands for in a simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    Environment,
    Test,
}

/// An ordered list of qubits with a role tag each.
///
/// Qubit 0 is the most significant position of a basis label, so the basis
/// index of `|q0 q1 ... q(n-1)>` reads as a binary number left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitRegister {
    roles: Vec<Role>,
}

impl QubitRegister {
    pub fn new(roles: Vec<Role>) -> Result<Self> {
        Self::with_limit(roles, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limit(roles: Vec<Role>, max: usize) -> Result<Self> {
        if roles.is_empty() {
            return Err(Error::EmptyRegister);
        }
        if roles.len() > max {
            return Err(Error::RegisterTooLarge {
                count: roles.len(),
                max,
            });
        }
        Ok(Self { roles })
    }

    /// `count` qubits, all tagged as system qubits.
    pub fn system(count: usize) -> Result<Self> {
        Self::new(vec![Role::System; count])
    }

    pub fn count(&self) -> usize {
        self.roles.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.roles.len()
    }

    pub fn role(&self, qubit: usize) -> Option<Role> {
        self.roles.get(qubit).copied()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Indices of all qubits carrying `role`, in register order.
    pub fn qubits_with(&self, role: Role) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == role)
            .map(|(i, _)| i)
            .collect()
    }

    /// The register obtained by appending `other`'s qubits after ours.
    pub fn concat(&self, other: &QubitRegister) -> Result<Self> {
        let mut roles = self.roles.clone();
        roles.extend_from_slice(&other.roles);
        Self::new(roles)
    }

    pub(crate) fn select(&self, keep: &[usize]) -> Result<Self> {
        Self::new(keep.iter().map(|&q| self.roles[q]).collect())
    }

    /// Checks that `targets` are distinct and inside the register.
    pub fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.count() {
                return Err(Error::TargetOutOfRange {
                    index: t,
                    count: self.count(),
                });
            }
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Bit mask of qubit `q` inside a basis index.
    #[inline]
    pub fn bit(&self, q: usize) -> usize {
        1 << (self.count() - 1 - q)
    }
}
