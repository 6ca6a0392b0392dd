//! Exact simulation of Zeno-type quantum error prevention.
//!
//! The crate covers four layers:
//!
//! * [`kernel`]: dense state vectors, density matrices, operators, projective
//!   measurement and partial traces over registers of up to 12 qubits.
//! * [`noise`]: slow entangling noise steps and the channels they induce,
//!   plus fast kick noise and correlated gadget noise.
//! * [`codes`] and [`gadgets`]: the four-particle and two-particle error
//!   prevention codes, brute-force code analysis, and the test-particle
//!   parity checks that project onto their code spaces.
//! * [`experiments`]: declarative sweeps over the number of checks `N` with
//!   CSV/JSON output and log-log slope fits.

pub mod codes;
pub mod error;
pub mod experiments;
pub mod gadgets;
pub mod kernel;
pub mod noise;
pub mod seeds;

pub use codes::{make_code, Code, CodeName};
pub use error::{Error, Result};
pub use experiments::{ExperimentResult, ExperimentSpec};
pub use gadgets::{GadgetProtocol, ObservationMode};
pub use kernel::{c, DensityMatrix, Operator, Pauli, PureState, QubitRegister, Role, C};
pub use noise::{Channel, CouplingKind, CouplingSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
