//! Experiment configuration documents.

use serde::{Deserialize, Serialize};

use crate::codes::{make_code, CodeName};
use crate::error::{Error, Result};
use crate::gadgets::{ObservationMode, TestInit};
use crate::kernel::{c, Pauli, PureState, QubitRegister, C};
use crate::noise::CouplingKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    ZenoSweep,
    UnprotectedBaseline,
    FastNoiseFailure,
    GadgetNoiseFailure,
    DephasingCode,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ZenoSweep => "zeno_sweep",
            ExperimentKind::UnprotectedBaseline => "unprotected_baseline",
            ExperimentKind::FastNoiseFailure => "fast_noise_failure",
            ExperimentKind::GadgetNoiseFailure => "gadget_noise_failure",
            ExperimentKind::DephasingCode => "dephasing_code",
        }
    }
}

fn default_env_dim() -> usize {
    2
}

fn default_pauli() -> Pauli {
    Pauli::X
}

/// Noise acting on every system qubit during each round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    None,
    Generic {
        #[serde(default = "default_env_dim")]
        env_dim: usize,
    },
    #[serde(alias = "dephasing")]
    DephasingOnly {
        #[serde(default = "default_env_dim")]
        env_dim: usize,
    },
    #[serde(alias = "flip")]
    FlipOnly {
        #[serde(default = "default_env_dim")]
        env_dim: usize,
    },
    /// Full-strength Pauli kicks with probability `p`, at `kicks_per_run`
    /// evenly spaced times during the run regardless of `N`.
    Kick {
        p: f64,
        #[serde(default = "default_pauli")]
        pauli: Pauli,
        kicks_per_run: usize,
    },
}

impl NoiseConfig {
    /// Slow-noise kind and environment size, if this is slow noise.
    pub fn coupling(&self) -> Option<(CouplingKind, usize)> {
        match *self {
            NoiseConfig::Generic { env_dim } => Some((CouplingKind::Generic, env_dim)),
            NoiseConfig::DephasingOnly { env_dim } => Some((CouplingKind::DephasingOnly, env_dim)),
            NoiseConfig::FlipOnly { env_dim } => Some((CouplingKind::FlipOnly, env_dim)),
            NoiseConfig::None | NoiseConfig::Kick { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseConfig::None => "none",
            NoiseConfig::Generic { .. } => "generic",
            NoiseConfig::DephasingOnly { .. } => "dephasing_only",
            NoiseConfig::FlipOnly { .. } => "flip_only",
            NoiseConfig::Kick { .. } => "kick",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetConfig {
    #[serde(default)]
    pub mode: ObservationMode,
    #[serde(default)]
    pub test_init: TestInit,
    #[serde(default = "one")]
    pub test_particles: usize,
}

fn one() -> usize {
    1
}

impl Default for GadgetConfig {
    fn default() -> Self {
        Self {
            mode: ObservationMode::default(),
            test_init: TestInit::default(),
            test_particles: 1,
        }
    }
}

/// Strength of the imperfection added after every gadget interaction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetNoiseConfig {
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogicalPreset {
    Zero,
    One,
    Plus,
    PlusI,
    /// Fixed state with unequal moduli and a complex relative phase.
    #[default]
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogicalInput {
    Preset(LogicalPreset),
    /// Amplitudes as `[re, im]` pairs, one per codeword.
    Amplitudes(Vec<[f64; 2]>),
}

impl Default for LogicalInput {
    fn default() -> Self {
        LogicalInput::Preset(LogicalPreset::Generic)
    }
}

impl LogicalInput {
    /// The normalized logical state for a code with `k` codewords.
    pub fn state(&self, k: usize) -> Result<PureState> {
        let amps: Vec<C> = match self {
            LogicalInput::Preset(p) => {
                let mut v = vec![c(0.0, 0.0); k];
                match p {
                    LogicalPreset::Zero => v[0] = c(1.0, 0.0),
                    LogicalPreset::One => v[1] = c(1.0, 0.0),
                    LogicalPreset::Plus => v.iter_mut().for_each(|a| *a = c(1.0, 0.0)),
                    LogicalPreset::PlusI => {
                        v[0] = c(1.0, 0.0);
                        v[1] = c(0.0, 1.0);
                    }
                    LogicalPreset::Generic => {
                        let pattern = [c(0.6, 0.0), c(0.48, 0.64), c(-0.3, 0.2), c(0.1, -0.5)];
                        v.iter_mut().zip(pattern).for_each(|(a, b)| *a = b);
                    }
                }
                v
            }
            LogicalInput::Amplitudes(a) => {
                if a.len() != k {
                    return Err(Error::config(
                        "logical_input",
                        format!("{} amplitudes given, the code has {k} codewords", a.len()),
                    ));
                }
                a.iter().map(|&[re, im]| c(re, im)).collect()
            }
        };
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::config("logical_input", "amplitudes must be finite"));
        }
        let n = k.trailing_zeros() as usize;
        let register = QubitRegister::system(n.max(1))?;
        PureState::from_amplitudes(register, amps)?
            .normalized()
            .map_err(|_| Error::config("logical_input", "the logical state has zero norm"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Simulation {
    /// Exact evolution of the density matrix; deterministic.
    #[default]
    DensityMatrix,
    /// Monte Carlo unraveling with sampled Kraus branches and test outcomes.
    Trajectories { trajectories: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Fidelity,
    Leakage,
    Detection,
    LogicalError,
}

fn all_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::Fidelity,
        OutputKind::Leakage,
        OutputKind::Detection,
        OutputKind::LogicalError,
    ]
}

/// A sweep over the number of checks `N` at fixed total noise `thetaT`:
/// each slow-noise step has strength `eps = thetaT / N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub code: CodeName,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub gadget: GadgetConfig,
    #[serde(default)]
    pub gadget_noise: Option<GadgetNoiseConfig>,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<usize>,
    #[serde(rename = "thetaT")]
    pub theta_t: f64,
    #[serde(default)]
    pub logical_input: LogicalInput,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub simulation: Simulation,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<OutputKind>,
    /// Lets the dephasing experiment run with noise the code cannot handle.
    #[serde(default)]
    pub allow_non_dephasing_noise: bool,
}

impl ExperimentSpec {
    /// Parses and validates a JSON document. Errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "config".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Step strength for a grid point.
    pub fn epsilon(&self, n: usize) -> f64 {
        self.theta_t / n as f64
    }

    /// Checks the spec for the experiment it names. Returns warnings for
    /// configurations that run but are not what the experiment is meant for.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.validate_as(self.experiment)
    }

    /// Checks the spec as input to a specific experiment.
    pub fn validate_as(&self, kind: ExperimentKind) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.n_grid.is_empty() {
            return Err(Error::config("N_grid", "at least one grid point is required"));
        }
        if let Some(i) = self.n_grid.iter().position(|&n| n == 0) {
            return Err(Error::config(format!("N_grid[{i}]"), "N must be at least 1"));
        }
        if let Some(i) = self.n_grid.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::config(
                format!("N_grid[{}]", i + 1),
                "entries must be strictly increasing",
            ));
        }
        if !self.theta_t.is_finite() || self.theta_t < 0.0 {
            return Err(Error::config("thetaT", format!("{} must be finite and >= 0", self.theta_t)));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("seeds", "seeds must be distinct"));
        }
        match self.noise {
            NoiseConfig::Generic { env_dim } | NoiseConfig::DephasingOnly { env_dim } | NoiseConfig::FlipOnly { env_dim } => {
                if ![2, 4, 8].contains(&env_dim) {
                    return Err(Error::config("noise.env_dim", format!("{env_dim} is not one of 2, 4, 8")));
                }
            }
            NoiseConfig::Kick { p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config("noise.p", format!("{p} is outside [0, 1]")));
                }
            }
            NoiseConfig::None => {}
        }
        if self.gadget.test_particles == 0 {
            return Err(Error::config("gadget.test_particles", "at least one test particle per step"));
        }
        if let Some(g) = self.gadget_noise {
            if !g.epsilon.is_finite() || g.epsilon < 0.0 {
                return Err(Error::config(
                    "gadget_noise.epsilon",
                    format!("{} must be finite and >= 0", g.epsilon),
                ));
            }
        }
        if let Simulation::Trajectories { trajectories: 0 } = self.simulation {
            return Err(Error::config("simulation.trajectories", "at least one trajectory"));
        }
        self.logical_input.state(make_code(self.code).codewords().len())?;

        match kind {
            ExperimentKind::FastNoiseFailure => {
                if !matches!(self.noise, NoiseConfig::Kick { .. }) {
                    return Err(Error::config("noise.kind", "fast_noise_failure needs kick noise"));
                }
            }
            ExperimentKind::GadgetNoiseFailure => {
                if self.gadget_noise.is_none() {
                    return Err(Error::config("gadget_noise", "gadget_noise_failure needs gadget_noise"));
                }
            }
            ExperimentKind::DephasingCode => {
                if self.code != CodeName::TwoParticleDephasing {
                    return Err(Error::config("code", "dephasing_code runs the two_particle_dephasing code"));
                }
                let dephasing = matches!(self.noise, NoiseConfig::None | NoiseConfig::DephasingOnly { .. });
                if !dephasing {
                    let msg = format!(
                        "{} noise is not dephasing; the code does not protect against it",
                        self.noise.kind_name()
                    );
                    if !self.allow_non_dephasing_noise {
                        return Err(Error::config(
                            "noise.kind",
                            format!("{msg} (set allow_non_dephasing_noise to run it anyway)"),
                        ));
                    }
                    warnings.push(msg);
                }
            }
            ExperimentKind::ZenoSweep | ExperimentKind::UnprotectedBaseline => {}
        }
        Ok(warnings)
    }
}
