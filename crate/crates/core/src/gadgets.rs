//! Test-particle parity checks.
//!
//! A step brings in a fresh test particle, lets it interact with each target
//! qubit in turn, and then either reads it out or discards it. The
//! interaction flips the test particle when the system qubit is `|1>`
//! (computational basis) or `|~1>` (tilde basis), so after a step the test
//! particle carries the parity of its targets in that basis. The step passes
//! when the test particle is found back in its initial state.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{Code, CodeName};
use crate::error::{Error, Result};
use crate::kernel::{c, sample_index, DensityMatrix, Operator, PureState, Role, C, MIN_BRANCH_PROB};
use crate::noise::{correlated_gadget_noise, CouplingKind, CouplingSpec};
use crate::seeds::{derive_seed, rng_for, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Computational,
    Tilde,
}

/// Flip of the test particle conditioned on a system qubit, as a two-qubit
/// operator on `(system, test)`.
pub fn parity_operator(basis: Basis) -> Operator {
    match basis {
        Basis::Computational => Operator::cnot(),
        Basis::Tilde => {
            let h = Operator::tilde().kron(&Operator::identity(1));
            h.compose(&Operator::cnot())
                .and_then(|m| m.compose(&h))
                .expect("same arity")
                .with_label("CNOT~")
        }
    }
}

/// Applies one parity interaction between `system` and `test`.
pub fn parity_interaction(state: &PureState, test: usize, system: usize, basis: Basis) -> Result<PureState> {
    if test == system {
        return Err(Error::invalid(
            "parity interaction",
            format!("test and system qubit are both {test}"),
        ));
    }
    state.apply(&parity_operator(basis), &[system, test])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetStep {
    pub basis: Basis,
    /// System qubits the test particle visits, in order.
    pub targets: Vec<usize>,
    #[serde(default)]
    pub description: String,
}

/// What happens to the test particle after a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObservationMode {
    /// Read the test particle and keep only the pass branch.
    #[serde(alias = "measure_postselect")]
    Postselect,
    /// Read the test particle but keep both branches as a mixture.
    #[default]
    #[serde(alias = "measure_nonselective")]
    Nonselective,
    /// Never read the test particle; it is traced out at the end of the step.
    CoupleOnly,
}

/// How each test particle is prepared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TestInit {
    #[default]
    Zero,
    /// Uniform on the Bloch sphere, excluding the flip eigenstates.
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetProtocol {
    pub steps: Vec<GadgetStep>,
    #[serde(default)]
    pub mode: ObservationMode,
    #[serde(default)]
    pub test_init: TestInit,
    /// Test particles sent through each step, one after another.
    #[serde(default = "one")]
    pub test_particles: usize,
}

fn one() -> usize {
    1
}

impl GadgetProtocol {
    pub fn new(steps: Vec<GadgetStep>) -> Self {
        Self {
            steps,
            mode: ObservationMode::default(),
            test_init: TestInit::default(),
            test_particles: 1,
        }
    }

    pub fn with_mode(mut self, mode: ObservationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_test_init(mut self, init: TestInit, particles: usize) -> Self {
        self.test_init = init;
        self.test_particles = particles;
        self
    }

    /// Checks the steps against a system register of `n_system` qubits.
    pub fn validate(&self, n_system: usize) -> Result<()> {
        if self.test_particles == 0 {
            return Err(Error::invalid("test_particles", "at least one test particle per step"));
        }
        for (i, step) in self.steps.iter().enumerate() {
            if step.targets.is_empty() {
                return Err(Error::invalid("gadget step", format!("step {i} has no targets")));
            }
            for (j, &t) in step.targets.iter().enumerate() {
                if t >= n_system {
                    return Err(Error::TargetOutOfRange {
                        index: t,
                        count: n_system,
                    });
                }
                if step.targets[..j].contains(&t) {
                    return Err(Error::DuplicateTarget(t));
                }
            }
        }
        Ok(())
    }
}

fn step(basis: Basis, targets: &[usize], description: &str) -> GadgetStep {
    GadgetStep {
        basis,
        targets: targets.to_vec(),
        description: description.into(),
    }
}

/// The check sequence projecting onto each code's space.
pub fn protocol_for(code: CodeName) -> GadgetProtocol {
    let steps = match code {
        CodeName::FourParticle => vec![
            step(Basis::Computational, &[0, 1], "parity of particles 1-2"),
            step(Basis::Computational, &[2, 3], "parity of particles 3-4"),
            step(Basis::Tilde, &[0, 1, 2, 3], "tilde parity of all four particles"),
        ],
        CodeName::FourParticleTwoLogical => vec![
            step(Basis::Computational, &[0, 1, 2, 3], "parity of all four particles"),
            step(Basis::Tilde, &[0, 1, 2, 3], "tilde parity of all four particles"),
        ],
        CodeName::TwoParticleDephasing => vec![step(Basis::Tilde, &[0, 1], "tilde parity of particles 1-2")],
    };
    GadgetProtocol::new(steps)
}

/// Supplies initial states for test particles in a reproducible order.
#[derive(Clone, Debug)]
pub struct TestParticleSource {
    init: TestInit,
    rng: ChaCha8Rng,
}

/// Random test states this close (in fidelity) to a flip eigenstate are redrawn.
pub const FLIP_EIGENSTATE_EXCLUSION: f64 = 1e-6;

impl TestParticleSource {
    pub fn new(init: TestInit, seed: u64) -> Self {
        Self {
            init,
            rng: rng_for(seed, Stream::TestParticle, 0),
        }
    }

    pub fn next_state(&mut self) -> [C; 2] {
        match self.init {
            TestInit::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            TestInit::Random => loop {
                let v = random_qubit(&mut self.rng);
                // |<~0|v>|^2 and |<~1|v>|^2
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let p0 = ((v[0] + v[1]) * h).norm_sqr();
                let p1 = ((v[0] - v[1]) * h).norm_sqr();
                if p0.max(p1) <= 1.0 - FLIP_EIGENSTATE_EXCLUSION {
                    break v;
                }
            },
        }
    }
}

fn random_qubit(rng: &mut impl Rng) -> [C; 2] {
    use rand_distr::{Distribution, StandardNormal};
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    let v = [c(g(), g()), c(g(), g())];
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn orthogonal_complement(t: [C; 2]) -> [C; 2] {
    [-t[1].conj(), t[0].conj()]
}

/// Imperfect interactions: one weak two-qubit unitary on (test, system) after
/// every interaction, fixed for the whole run.
#[derive(Clone, Debug)]
pub struct GadgetNoise {
    /// `[step][target position]`
    unitaries: Vec<Vec<Operator>>,
}

impl GadgetNoise {
    pub fn new(protocol: &GadgetProtocol, epsilon: f64, seed: u64) -> Result<Self> {
        let unitaries = protocol
            .steps
            .iter()
            .enumerate()
            .map(|(s, st)| {
                (0..st.targets.len())
                    .map(|k| {
                        let idx = ((s as u64) << 16) | k as u64;
                        correlated_gadget_noise(&CouplingSpec::new(
                            CouplingKind::Generic,
                            epsilon,
                            derive_seed(seed, Stream::GadgetNoise, idx),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { unitaries })
    }

    fn get(&self, step: usize, pos: usize) -> &Operator {
        &self.unitaries[step][pos]
    }
}

/// How a gadget run on a pure state chooses measurement branches.
pub enum Branch<'a> {
    /// Condition on every test particle passing.
    AllPass,
    /// Condition on the given per-step results (`true` = pass). A forced
    /// failure applies to every test particle of that step.
    Forced(&'a [bool]),
    /// Sample outcomes with Born probabilities.
    Sample(&'a mut dyn RngCore),
}

#[derive(Clone, Debug)]
pub struct GadgetOutcome<S> {
    /// Post-gadget state, normalized.
    pub state: S,
    /// Per-step result; `None` when the test particle was not read.
    pub outcomes: Vec<Option<bool>>,
    /// Probability of the recorded outcomes (1 when nothing was conditioned on).
    pub probability: f64,
    /// Every test particle took its pass branch, whether or not it was read.
    pub passed: bool,
}

/// Runs protocols with a given test-particle supply and optional noise.
pub struct GadgetRunner<'p> {
    protocol: &'p GadgetProtocol,
    tests: TestParticleSource,
    noise: Option<GadgetNoise>,
}

impl<'p> GadgetRunner<'p> {
    pub fn new(protocol: &'p GadgetProtocol, seed: u64) -> Self {
        Self {
            protocol,
            tests: TestParticleSource::new(protocol.test_init, seed),
            noise: None,
        }
    }

    pub fn with_noise(mut self, noise: Option<GadgetNoise>) -> Self {
        self.noise = noise;
        self
    }

    pub fn protocol(&self) -> &GadgetProtocol {
        self.protocol
    }

    fn couple_pure(&self, state: &PureState, step: usize, test: usize) -> Result<PureState> {
        let st = &self.protocol.steps[step];
        let op = parity_operator(st.basis);
        let mut s = state.clone();
        for (pos, &q) in st.targets.iter().enumerate() {
            s.apply_in_place(&op, &[q, test])?;
            if let Some(noise) = &self.noise {
                s.apply_in_place(noise.get(step, pos), &[test, q])?;
            }
        }
        Ok(s)
    }

    fn couple_mixed(&self, rho: &DensityMatrix, step: usize, test: usize) -> Result<DensityMatrix> {
        let st = &self.protocol.steps[step];
        let op = parity_operator(st.basis);
        let mut r = rho.clone();
        for (pos, &q) in st.targets.iter().enumerate() {
            r.apply_operator_in_place(&op, &[q, test])?;
            if let Some(noise) = &self.noise {
                r.apply_operator_in_place(noise.get(step, pos), &[test, q])?;
            }
        }
        Ok(r)
    }

    /// Gadget on a pure state. In `CoupleOnly` mode the test particle is
    /// discarded by sampling its reduced outcome, which unravels the partial
    /// trace; the outcome is not recorded.
    pub fn run_pure(&mut self, state: &PureState, mut branch: Branch<'_>) -> Result<GadgetOutcome<PureState>> {
        self.protocol.validate(state.num_qubits())?;
        if let Branch::Forced(f) = &branch {
            if f.len() != self.protocol.steps.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.protocol.steps.len(),
                    found: f.len(),
                });
            }
        }
        let test = state.num_qubits();
        let mut current = state.clone();
        let mut outcomes = Vec::with_capacity(self.protocol.steps.len());
        let mut probability = 1.0;
        let mut passed = true;
        for s in 0..self.protocol.steps.len() {
            let mut step_pass = true;
            for _ in 0..self.protocol.test_particles {
                let t = self.tests.next_state();
                let ext = current.tensor(&PureState::qubit(t[0], t[1], Role::Test))?;
                let ext = self.couple_pure(&ext, s, test)?;
                let pass = ext.contract_qubit(test, t)?;
                let fail = ext.contract_qubit(test, orthogonal_complement(t))?;
                let weights = [pass.norm_sqr(), fail.norm_sqr()];
                let take_pass = match &mut branch {
                    Branch::AllPass => true,
                    Branch::Forced(f) => f[s],
                    Branch::Sample(rng) => sample_index(&weights, &mut **rng) == 0,
                };
                let (chosen, p) = if take_pass { (pass, weights[0]) } else { (fail, weights[1]) };
                if !matches!(branch, Branch::Sample(_)) && p < MIN_BRANCH_PROB {
                    return Err(Error::ZeroProbabilityBranch { probability: p });
                }
                probability *= p;
                step_pass &= take_pass;
                current = chosen.normalized()?;
            }
            let observed = !matches!(self.protocol.mode, ObservationMode::CoupleOnly);
            outcomes.push(observed.then_some(step_pass));
            passed &= step_pass;
        }
        Ok(GadgetOutcome {
            state: current,
            outcomes,
            probability,
            passed,
        })
    }

    /// Gadget on a density matrix. `Postselect` keeps the all-pass branch
    /// (and reports its probability); the other modes keep everything.
    pub fn run_mixed(&mut self, rho: &DensityMatrix) -> Result<GadgetOutcome<DensityMatrix>> {
        self.run_mixed_as(rho, self.protocol.mode)
    }

    /// As [`GadgetRunner::run_mixed`], overriding the protocol's mode.
    pub fn run_mixed_as(&mut self, rho: &DensityMatrix, mode: ObservationMode) -> Result<GadgetOutcome<DensityMatrix>> {
        self.protocol.validate(rho.num_qubits())?;
        let test = rho.num_qubits();
        let keep: Vec<usize> = (0..test).collect();
        let mut current = rho.clone();
        let mut probability = 1.0;
        for s in 0..self.protocol.steps.len() {
            for _ in 0..self.protocol.test_particles {
                let t = self.tests.next_state();
                let t_rho = DensityMatrix::from_pure(&PureState::qubit(t[0], t[1], Role::Test));
                let ext = self.couple_mixed(&current.tensor(&t_rho)?, s, test)?;
                current = match mode {
                    ObservationMode::Postselect => {
                        let before = current.trace();
                        let mut pass = ext.contract_qubit(test, t)?;
                        let p = pass.trace() / before;
                        if p < MIN_BRANCH_PROB {
                            return Err(Error::ZeroProbabilityBranch { probability: p });
                        }
                        probability *= p;
                        pass.normalize()?;
                        pass
                    }
                    ObservationMode::Nonselective => {
                        let pass = ext.contract_qubit(test, t)?;
                        let fail = ext.contract_qubit(test, orthogonal_complement(t))?;
                        pass.add(&fail)?
                    }
                    ObservationMode::CoupleOnly => ext.partial_trace(&keep)?,
                };
            }
        }
        let observed = matches!(mode, ObservationMode::Postselect);
        Ok(GadgetOutcome {
            state: current,
            outcomes: vec![observed.then_some(true); self.protocol.steps.len()],
            probability,
            passed: true,
        })
    }
}

/// Convenience wrapper: noiseless gadget with test particles seeded by 0.
pub fn run_gadget(state: &PureState, protocol: &GadgetProtocol, branch: Branch<'_>) -> Result<GadgetOutcome<PureState>> {
    GadgetRunner::new(protocol, 0).run_pure(state, branch)
}

/// `P|psi>/||P|psi>||` and `||P|psi>||^2` computed directly from the code projector.
pub fn direct_projection(code: &Code, state: &PureState) -> Result<(PureState, f64)> {
    let projected = code.project(state)?;
    let p = projected.norm_sqr();
    Ok((projected.normalized()?, p))
}
