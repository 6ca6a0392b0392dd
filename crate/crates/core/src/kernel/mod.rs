//! Dense state-vector and density-matrix kernels over small qubit registers.

mod apply;
mod density;
mod measure;
mod operator;
mod register;
mod state;

pub use density::DensityMatrix;
pub use measure::{fidelity, measure_projective, Fidelity, MeasureMode, Measurement};
pub(crate) use measure::sample_index;
pub(crate) use operator::max_abs_diff;
pub use operator::{Operator, Pauli};
pub use register::{QubitRegister, Role, DEFAULT_MAX_QUBITS};
pub use state::PureState;

/// Complex amplitude type used throughout.
pub type C = num_complex::Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub(crate) const UNITARY_TOL: f64 = 1e-10;
pub(crate) const PROJECTOR_TOL: f64 = 1e-8;
/// Branches below this probability cannot be conditioned on.
pub const MIN_BRANCH_PROB: f64 = 1e-14;
