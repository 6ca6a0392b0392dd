//! Noise processes acting on the system qubits.
//!
//! Slow noise is a weak entangling step `U = exp(-i eps H)` between one
//! system qubit and a fresh environment prepared in `|e> = |0>`. Expanding
//! `U|s>|e>` gives `gamma_s |s>|e> + O(eps)` terms, with
//! `|gamma_s| = 1 - O(eps^2)`. Tracing the environment out yields a
//! single-qubit Kraus channel. Fast noise is a full-strength Pauli kick with
//! a fixed probability, and gadget noise is a weak two-qubit perturbation
//! between the test particle and the system qubit it just touched.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{c, max_abs_diff, Operator, Pauli, C};

const KRAUS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// Unrestricted traceless generator.
    Generic,
    /// Generator commutes with Z on the system qubit: populations are untouched.
    #[serde(alias = "dephasing")]
    DephasingOnly,
    /// Generator anticommutes with Z on the system qubit.
    #[serde(alias = "flip")]
    FlipOnly,
}

fn default_env_dim() -> usize {
    2
}

/// Parameters of one slow-noise step on one system qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default = "default_env_dim")]
    pub env_dim: usize,
}

impl CouplingSpec {
    pub fn new(kind: CouplingKind, epsilon: f64, seed: u64) -> Self {
        Self {
            kind,
            epsilon,
            seed,
            env_dim: default_env_dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::invalid(
                "epsilon",
                format!("{} is not a finite non-negative number", self.epsilon),
            ));
        }
        if !self.env_dim.is_power_of_two() || !(2..=8).contains(&self.env_dim) {
            return Err(Error::invalid(
                "env_dim",
                format!("{} is not one of 2, 4, 8", self.env_dim),
            ));
        }
        Ok(())
    }
}

/// A CPTP map given by its Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<Operator>,
    label: String,
}

impl Channel {
    /// Rejects empty or mixed-arity sets and sets with `sum K^dag K != I` (1e-8).
    pub fn new(kraus: Vec<Operator>, label: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("kraus", "at least one operator is required"))?;
        let d = first.dim();
        if let Some(bad) = kraus.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let sum = kraus.iter().fold(DMatrix::<C>::zeros(d, d), |acc, k| {
            acc + k.matrix().adjoint() * k.matrix()
        });
        let deviation = max_abs_diff(&sum, &DMatrix::identity(d, d));
        if deviation > KRAUS_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            kraus,
            label: label.into(),
        })
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            kraus: vec![Operator::identity(arity)],
            label: "identity".into(),
        }
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    pub fn arity(&self) -> usize {
        self.kraus[0].arity()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Max-norm of `sum K^dag K - I`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.kraus[0].dim();
        let sum = self.kraus.iter().fold(DMatrix::<C>::zeros(d, d), |acc, k| {
            acc + k.matrix().adjoint() * k.matrix()
        });
        max_abs_diff(&sum, &DMatrix::identity(d, d))
    }
}

/// Seeded random Hermitian generator on `2 * env_dim` dimensions (system
/// factor first), restricted by `kind`, traceless, with unit spectral norm.
pub fn random_generator(kind: CouplingKind, seed: u64, env_dim: usize) -> DMatrix<C> {
    let d = 2 * env_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let a = DMatrix::from_fn(d, d, |_, _| c(draw(), draw()));
    let mut h = (&a + a.adjoint()).unscale(2.0);
    for r in 0..d {
        for col in 0..d {
            let same_sys = r / env_dim == col / env_dim;
            let keep = match kind {
                CouplingKind::Generic => true,
                CouplingKind::DephasingOnly => same_sys,
                CouplingKind::FlipOnly => !same_sys,
            };
            if !keep {
                h[(r, col)] = c(0.0, 0.0);
            }
        }
    }
    let shift = h.trace() / d as f64;
    for i in 0..d {
        h[(i, i)] -= shift;
    }
    let norm = spectral_radius(&h);
    h.unscale(norm)
}

fn spectral_radius(h: &DMatrix<C>) -> f64 {
    h.symmetric_eigenvalues()
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// `exp(-i eps H)` for Hermitian `H`, via its eigendecomposition.
pub fn evolve(h: &DMatrix<C>, epsilon: f64) -> DMatrix<C> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C::from_polar(1.0, -epsilon * l)));
    v * phases * v.adjoint()
}

/// Coefficients of one coupling step, in the form
/// `U|s>|e> = gamma_s |s>|e> + (terms orthogonal to |s>|e>)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingCoefficients {
    pub gamma: [C; 2],
    /// Largest modulus among the orthogonal components, over both inputs.
    pub delta_max: f64,
}

impl CouplingCoefficients {
    pub fn of(u: &DMatrix<C>, env_dim: usize) -> Self {
        let mut gamma = [c(0.0, 0.0); 2];
        let mut delta_max: f64 = 0.0;
        for (s, g) in gamma.iter_mut().enumerate() {
            let col = s * env_dim;
            *g = u[(col, col)];
            for r in (0..u.nrows()).filter(|&r| r != col) {
                delta_max = delta_max.max(u[(r, col)].norm());
            }
        }
        Self { gamma, delta_max }
    }

    pub fn gamma_min(&self) -> f64 {
        self.gamma[0].norm().min(self.gamma[1].norm())
    }

    /// `|gamma| >= 1 - eps^2` and `|delta| <= 2 eps`, up to rounding.
    pub fn is_slow(&self, epsilon: f64) -> bool {
        const ROUNDING: f64 = 1e-12;
        self.gamma_min() >= 1.0 - epsilon * epsilon - ROUNDING
            && self.delta_max <= 2.0 * epsilon + ROUNDING
    }
}

fn checked_step(h: &DMatrix<C>, epsilon: f64, env_dim: usize) -> Result<DMatrix<C>> {
    let u = evolve(h, epsilon);
    let coeffs = CouplingCoefficients::of(&u, env_dim);
    if !coeffs.is_slow(epsilon) {
        return Err(Error::CouplingTooStrong {
            epsilon,
            gamma_min: coeffs.gamma_min(),
            delta_max: coeffs.delta_max,
        });
    }
    Ok(u)
}

/// The joint step unitary on (system qubit, environment).
pub fn build_coupling_unitary(spec: &CouplingSpec) -> Result<Operator> {
    spec.validate()?;
    let h = random_generator(spec.kind, spec.seed, spec.env_dim);
    let u = checked_step(&h, spec.epsilon, spec.env_dim)?;
    Operator::unitary(u, format!("coupling(eps={})", spec.epsilon))
}

/// Single-qubit channel obtained by tracing a fresh environment out of one
/// coupling step: `K_m = <m|_env U |e>_env`.
pub fn derive_channel(spec: &CouplingSpec) -> Result<Channel> {
    let u = build_coupling_unitary(spec)?;
    let e = spec.env_dim;
    let kraus = (0..e)
        .map(|m| {
            let k = DMatrix::from_fn(2, 2, |out, inp| u.matrix()[(out * e + m, inp * e)]);
            Operator::new(k, format!("K{m}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::new(kraus, format!("{:?}(eps={})", spec.kind, spec.epsilon))
}

/// Full-strength Pauli error with probability `p`: `{sqrt(1-p) I, sqrt(p) E}`.
pub fn kick_noise(p: f64, pauli: Pauli) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("{p} is outside [0, 1]")));
    }
    let keep = Operator::new(
        DMatrix::identity(2, 2).scale((1.0 - p).sqrt()).map(|v: f64| c(v, 0.0)),
        "sqrt(1-p) I",
    )?;
    let kick = Operator::new(pauli.matrix() * c(p.sqrt(), 0.0), format!("sqrt(p) {pauli}"))?;
    Channel::new(vec![keep, kick], format!("kick-{pauli}(p={p})"))
}

/// Weak two-qubit perturbation on (test particle, system qubit), applied after
/// each gadget interaction. The generator is always unrestricted; `spec.kind`
/// and `spec.env_dim` are ignored.
pub fn correlated_gadget_noise(spec: &CouplingSpec) -> Result<Operator> {
    let spec = CouplingSpec {
        kind: CouplingKind::Generic,
        env_dim: 2,
        ..*spec
    };
    spec.validate()?;
    let h = random_generator(CouplingKind::Generic, spec.seed, 2);
    let u = checked_step(&h, spec.epsilon, 2)?;
    Operator::unitary(u, format!("gadget-noise(eps={})", spec.epsilon))
}
