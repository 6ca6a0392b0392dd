//! Grid-point simulation and sweep assembly.
//!
//! A run at grid point `N` encodes the logical input and then repeats `N`
//! rounds of noise on every system qubit followed by one pass of the code's
//! gadget protocol. Slow noise has strength `eps = thetaT / N`, so the total
//! noise over a run does not depend on `N`.

use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, ExperimentSpec, NoiseConfig, OutputKind, Simulation};
use super::fit::{fit_loglog_slope, SlopeFit};
use crate::codes::{decode, encode, make_code, Code};
use crate::error::{Error, Result};
use crate::gadgets::{protocol_for, Branch, GadgetNoise, GadgetProtocol, GadgetRunner, ObservationMode};
use crate::kernel::{sample_index, DensityMatrix, PureState};
use crate::noise::{derive_channel, kick_noise, Channel, CouplingSpec};
use crate::seeds::{derive_seed, rng_for, Stream};

/// Values at or below this are treated as zero and not fitted.
const FIT_FLOOR: f64 = 1e-13;

/// One `(N, seed)` task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    /// `<psi_0|rho|psi_0>` against the initial encoded state.
    pub fidelity: f64,
    /// `1 - tr(P rho)`.
    pub leakage: f64,
    /// Probability that at least one test particle failed during the run.
    pub detect_prob: f64,
    pub allpass_prob: f64,
    /// Infidelity of the decoded logical state.
    pub logical_error: f64,
    /// Standard error of `fidelity` over trajectories; `None` for exact runs.
    pub fidelity_stderr: Option<f64>,
    /// `sqrt(1 - F)` of the decoded logical state after the first
    /// post-selected round.
    pub round_error: Option<f64>,
    pub wall_time_s: f64,
}

/// Seed-averaged values at one `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub leakage: f64,
    pub detect_prob: f64,
    pub allpass_prob: f64,
    pub logical_error: f64,
    pub fidelity_stderr: Option<f64>,
    pub round_error: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub infidelity: Option<SlopeFit>,
    pub detection: Option<SlopeFit>,
    pub leakage: Option<SlopeFit>,
    pub logical_error: Option<SlopeFit>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Extras {
    /// Fidelity at the largest `N` minus fidelity at the smallest.
    pub fidelity_gain: Option<f64>,
    /// Grid point with the highest fidelity.
    pub optimum_n: Option<usize>,
    /// Best interior point strictly above both endpoints.
    pub interior_optimum: Option<bool>,
    pub round_error_slope: Option<SlopeFit>,
    pub trajectories: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub experiment: ExperimentKind,
    pub version: String,
    pub config: ExperimentSpec,
    pub seeds: Vec<u64>,
    /// Sorted by `N`, then seed.
    pub records: Vec<RunRecord>,
    /// One entry per `N_grid` value, in grid order.
    pub grid: Vec<GridPoint>,
    pub slopes: Slopes,
    pub extras: Extras,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
}

impl ExperimentResult {
    pub fn point(&self, n: usize) -> Option<&GridPoint> {
        self.grid.iter().find(|g| g.n == n)
    }
}

pub fn run_zeno_sweep(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    sweep(spec, ExperimentKind::ZenoSweep, true)
}

/// The same noise schedule with no gadgets at all.
pub fn run_unprotected_baseline(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    sweep(spec, ExperimentKind::UnprotectedBaseline, false)
}

pub fn run_fast_noise_failure(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    sweep(spec, ExperimentKind::FastNoiseFailure, true)
}

pub fn run_gadget_noise_failure(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    sweep(spec, ExperimentKind::GadgetNoiseFailure, true)
}

pub fn run_dephasing_code(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    sweep(spec, ExperimentKind::DephasingCode, true)
}

/// Runs the experiment named in the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    match spec.experiment {
        ExperimentKind::ZenoSweep => run_zeno_sweep(spec),
        ExperimentKind::UnprotectedBaseline => run_unprotected_baseline(spec),
        ExperimentKind::FastNoiseFailure => run_fast_noise_failure(spec),
        ExperimentKind::GadgetNoiseFailure => run_gadget_noise_failure(spec),
        ExperimentKind::DephasingCode => run_dephasing_code(spec),
    }
}

fn sweep(spec: &ExperimentSpec, kind: ExperimentKind, protected: bool) -> Result<ExperimentResult> {
    let warnings = spec.validate_as(kind)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let start = Instant::now();
    let ctx = Context::new(spec, protected)?;
    let mut seeds = spec.seeds.clone();
    seeds.sort_unstable();
    let tasks: Vec<(usize, u64)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let records = tasks
        .par_iter()
        .map(|&(n, seed)| {
            let rec = ctx.run_point(n, seed)?;
            log::debug!("N = {n} seed = {seed}: F = {:.12}", rec.fidelity);
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = summarize(spec, &records);
    let slopes = fit_slopes(&grid, &spec.outputs);
    let mut extras = extras_for(&grid);
    if let Simulation::Trajectories { trajectories } = spec.simulation {
        extras.trajectories = Some(trajectories);
    }
    Ok(ExperimentResult {
        name: spec.name.clone(),
        experiment: kind,
        version: crate::VERSION.to_string(),
        config: spec.clone(),
        seeds,
        records,
        grid,
        slopes,
        extras,
        warnings,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

struct Context<'a> {
    spec: &'a ExperimentSpec,
    code: Code,
    protocol: Option<GadgetProtocol>,
    logical: PureState,
    encoded: PureState,
}

impl<'a> Context<'a> {
    fn new(spec: &'a ExperimentSpec, protected: bool) -> Result<Self> {
        let code = make_code(spec.code);
        let logical = spec.logical_input.state(code.codewords().len())?;
        let encoded = encode(&code, &logical)?;
        let protocol = if protected {
            let p = protocol_for(spec.code)
                .with_mode(spec.gadget.mode)
                .with_test_init(spec.gadget.test_init, spec.gadget.test_particles);
            p.validate(code.n_physical())?;
            Some(p)
        } else {
            None
        };
        Ok(Self {
            spec,
            code,
            protocol,
            logical,
            encoded,
        })
    }

    fn run_point(&self, n: usize, seed: u64) -> Result<RunRecord> {
        let start = Instant::now();
        let mut rec = match self.spec.simulation {
            Simulation::DensityMatrix => self.run_density(n, seed)?,
            Simulation::Trajectories { trajectories } => self.run_trajectories(n, seed, trajectories)?,
        };
        rec.wall_time_s = start.elapsed().as_secs_f64();
        Ok(rec)
    }

    fn gadget_noise(&self, protocol: &GadgetProtocol, seed: u64) -> Result<Option<GadgetNoise>> {
        match self.spec.gadget_noise {
            Some(g) if g.epsilon > 0.0 => Ok(Some(GadgetNoise::new(protocol, g.epsilon, seed)?)),
            _ => Ok(None),
        }
    }

    fn postselects(&self) -> bool {
        self.protocol
            .as_ref()
            .is_some_and(|p| p.mode == ObservationMode::Postselect)
    }

    /// Fidelity, leakage and logical error of a normalized state.
    fn metrics(&self, rho: &DensityMatrix) -> Result<(f64, f64, f64)> {
        let fidelity = rho.expectation_in(&self.encoded)?;
        let decoded = decode(&self.code, rho)?;
        let logical_error = match decoded.logical {
            Some(l) => 1.0 - l.expectation_in(&self.logical)?,
            None => 1.0,
        };
        Ok((clamp01(fidelity), clamp01(decoded.leakage), clamp01(logical_error)))
    }

    fn round_error(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.metrics(rho)?.2.sqrt())
    }

    fn run_density(&self, n: usize, seed: u64) -> Result<RunRecord> {
        let noise = RoundNoise::new(self.spec, n, seed, self.code.n_physical())?;
        let mut rho = DensityMatrix::from_pure(&self.encoded);
        let mut allpass = 1.0;
        let mut round_error = None;
        if let Some(protocol) = &self.protocol {
            let test_seed = derive_seed(seed, Stream::TestParticle, 0);
            let gnoise = self.gadget_noise(protocol, seed)?;
            let postselect = self.postselects();
            let mut main = GadgetRunner::new(protocol, test_seed).with_noise(gnoise.clone());
            // without post-selection, a second copy follows the all-pass
            // branch to measure the detection probability
            let mut shadow = (!postselect).then(|| (GadgetRunner::new(protocol, test_seed).with_noise(gnoise), rho.clone()));
            for r in 1..=n {
                rho = noise.apply_mixed(&rho, r, n)?;
                let out = main.run_mixed(&rho)?;
                rho = out.state;
                if postselect {
                    allpass *= out.probability;
                    if r == 1 {
                        round_error = Some(self.round_error(&rho)?);
                    }
                }
                let mut lost = false;
                if let Some((runner, branch)) = shadow.as_mut() {
                    let moved = noise.apply_mixed(branch, r, n)?;
                    match runner.run_mixed_as(&moved, ObservationMode::Postselect) {
                        Ok(o) => {
                            allpass *= o.probability;
                            *branch = o.state;
                            if r == 1 {
                                round_error = Some(self.round_error(branch)?);
                            }
                        }
                        Err(Error::ZeroProbabilityBranch { .. }) => lost = true,
                        Err(e) => return Err(e),
                    }
                }
                if lost {
                    allpass = 0.0;
                    shadow = None;
                }
            }
        } else {
            for r in 1..=n {
                rho = noise.apply_mixed(&rho, r, n)?;
            }
        }
        let (fidelity, leakage, logical_error) = self.metrics(&rho)?;
        let allpass = clamp01(allpass);
        Ok(RunRecord {
            n,
            seed,
            fidelity,
            leakage,
            detect_prob: clamp01(1.0 - allpass),
            allpass_prob: allpass,
            logical_error,
            fidelity_stderr: None,
            round_error,
            wall_time_s: 0.0,
        })
    }

    fn run_trajectories(&self, n: usize, seed: u64, count: usize) -> Result<RunRecord> {
        let noise = RoundNoise::new(self.spec, n, seed, self.code.n_physical())?;
        let test_seed = derive_seed(seed, Stream::TestParticle, 0);
        let gnoise = match &self.protocol {
            Some(p) => self.gadget_noise(p, seed)?,
            None => None,
        };
        let postselect = self.postselects();
        let (mut kept, mut passed_count) = (0usize, 0usize);
        let (mut f_sum, mut f_sq, mut leak_sum, mut le_sum) = (0.0, 0.0, 0.0, 0.0);
        for t in 0..count {
            let mut rng = rng_for(seed, Stream::Trajectory, t as u64);
            let mut psi = self.encoded.clone();
            let mut passed = true;
            let mut runner = self
                .protocol
                .as_ref()
                .map(|p| GadgetRunner::new(p, test_seed).with_noise(gnoise.clone()));
            for r in 1..=n {
                psi = noise.apply_pure(&psi, r, n, &mut rng)?;
                if let Some(runner) = runner.as_mut() {
                    let out = runner.run_pure(&psi, Branch::Sample(&mut rng))?;
                    passed &= out.passed;
                    psi = out.state;
                    if postselect && !passed {
                        break;
                    }
                }
            }
            if passed {
                passed_count += 1;
            } else if postselect {
                continue;
            }
            let (f, leak, le) = self.metrics(&DensityMatrix::from_pure(&psi))?;
            kept += 1;
            f_sum += f;
            f_sq += f * f;
            leak_sum += leak;
            le_sum += le;
        }
        if kept == 0 {
            return Err(Error::ZeroProbabilityBranch { probability: 0.0 });
        }
        let k = kept as f64;
        let mean = f_sum / k;
        let var = if kept > 1 {
            ((f_sq - k * mean * mean) / (k - 1.0)).max(0.0)
        } else {
            0.0
        };
        let allpass = passed_count as f64 / count as f64;
        Ok(RunRecord {
            n,
            seed,
            fidelity: clamp01(mean),
            leakage: clamp01(leak_sum / k),
            detect_prob: 1.0 - allpass,
            allpass_prob: allpass,
            logical_error: clamp01(le_sum / k),
            fidelity_stderr: Some((var / k).sqrt()),
            round_error: None,
            wall_time_s: 0.0,
        })
    }
}

/// Noise applied in each round of a run at one grid point.
struct RoundNoise {
    /// Slow-noise channel per system qubit, fixed over the run.
    slow: Vec<Channel>,
    /// Kick channel and number of kicks per run.
    kick: Option<(Channel, usize)>,
}

impl RoundNoise {
    fn new(spec: &ExperimentSpec, n: usize, seed: u64, qubits: usize) -> Result<Self> {
        let slow = match spec.noise.coupling() {
            Some((kind, env_dim)) => (0..qubits)
                .map(|q| {
                    derive_channel(&CouplingSpec {
                        kind,
                        epsilon: spec.epsilon(n),
                        seed: derive_seed(seed, Stream::Coupling, q as u64),
                        env_dim,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let kick = match spec.noise {
            NoiseConfig::Kick { p, pauli, kicks_per_run } => Some((kick_noise(p, pauli)?, kicks_per_run)),
            _ => None,
        };
        Ok(Self { slow, kick })
    }

    /// Kicks falling in round `r` of `n` when `k` kicks are spread evenly.
    fn kicks_in_round(r: usize, n: usize, k: usize) -> usize {
        r * k / n - (r - 1) * k / n
    }

    fn kick_count(&self, r: usize, n: usize) -> usize {
        self.kick.as_ref().map_or(0, |(_, k)| Self::kicks_in_round(r, n, *k))
    }

    fn apply_mixed(&self, rho: &DensityMatrix, r: usize, n: usize) -> Result<DensityMatrix> {
        let mut out = rho.clone();
        for (q, ch) in self.slow.iter().enumerate() {
            out = out.apply_channel(ch, &[q])?;
        }
        if let Some((ch, _)) = &self.kick {
            for _ in 0..self.kick_count(r, n) {
                for q in 0..out.num_qubits() {
                    out = out.apply_channel(ch, &[q])?;
                }
            }
        }
        Ok(out)
    }

    fn apply_pure(&self, psi: &PureState, r: usize, n: usize, rng: &mut dyn RngCore) -> Result<PureState> {
        let mut out = psi.clone();
        for (q, ch) in self.slow.iter().enumerate() {
            out = sample_kraus(&out, ch, q, rng)?;
        }
        if let Some((ch, _)) = &self.kick {
            for _ in 0..self.kick_count(r, n) {
                for q in 0..out.num_qubits() {
                    out = sample_kraus(&out, ch, q, rng)?;
                }
            }
        }
        Ok(out)
    }
}

fn sample_kraus(psi: &PureState, channel: &Channel, qubit: usize, rng: &mut dyn RngCore) -> Result<PureState> {
    let branches = channel
        .kraus()
        .iter()
        .map(|k| psi.apply(k, &[qubit]))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = branches.iter().map(PureState::norm_sqr).collect();
    let i = sample_index(&weights, rng);
    branches.into_iter().nth(i).expect("index in range").normalized()
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn summarize(spec: &ExperimentSpec, records: &[RunRecord]) -> Vec<GridPoint> {
    spec.n_grid
        .iter()
        .map(|&n| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.n == n).collect();
            let m = rs.len() as f64;
            let mean = |f: fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / m;
            let fidelity = mean(|r| r.fidelity);
            let fidelity_stderr = rs
                .iter()
                .map(|r| r.fidelity_stderr.map(|s| s * s))
                .sum::<Option<f64>>()
                .map(|v| v.sqrt() / m);
            let round_error = rs
                .iter()
                .map(|r| r.round_error)
                .sum::<Option<f64>>()
                .map(|v| v / m);
            GridPoint {
                n,
                epsilon: spec.epsilon(n),
                fidelity,
                infidelity: clamp01(1.0 - fidelity),
                leakage: mean(|r| r.leakage),
                detect_prob: mean(|r| r.detect_prob),
                allpass_prob: mean(|r| r.allpass_prob),
                logical_error: mean(|r| r.logical_error),
                fidelity_stderr,
                round_error,
                wall_time_s: rs.iter().map(|r| r.wall_time_s).sum(),
            }
        })
        .collect()
}

fn fit_metric(grid: &[GridPoint], value: impl Fn(&GridPoint) -> Option<f64>) -> Option<SlopeFit> {
    let pts: Option<Vec<(f64, f64)>> = grid
        .iter()
        .map(|g| value(g).filter(|v| *v > FIT_FLOOR).map(|v| (g.n as f64, v)))
        .collect();
    pts.and_then(|p| fit_loglog_slope(&p).ok())
}

fn fit_slopes(grid: &[GridPoint], outputs: &[OutputKind]) -> Slopes {
    let want = |k: OutputKind| outputs.contains(&k);
    Slopes {
        infidelity: want(OutputKind::Fidelity)
            .then(|| fit_metric(grid, |g| Some(g.infidelity)))
            .flatten(),
        detection: want(OutputKind::Detection)
            .then(|| fit_metric(grid, |g| Some(g.detect_prob)))
            .flatten(),
        leakage: want(OutputKind::Leakage)
            .then(|| fit_metric(grid, |g| Some(g.leakage)))
            .flatten(),
        logical_error: want(OutputKind::LogicalError)
            .then(|| fit_metric(grid, |g| Some(g.logical_error)))
            .flatten(),
    }
}

fn extras_for(grid: &[GridPoint]) -> Extras {
    let mut ex = Extras::default();
    if let (Some(first), Some(last)) = (grid.first(), grid.last()) {
        if grid.len() >= 2 {
            ex.fidelity_gain = Some(last.fidelity - first.fidelity);
        }
        let best = grid
            .iter()
            .fold(first, |b, g| if g.fidelity > b.fidelity { g } else { b });
        ex.optimum_n = Some(best.n);
        if grid.len() >= 3 {
            let inner = &grid[1..grid.len() - 1];
            let top = inner.iter().map(|g| g.fidelity).fold(f64::NEG_INFINITY, f64::max);
            ex.interior_optimum = Some(top > first.fidelity && top > last.fidelity);
        }
    }
    ex.round_error_slope = fit_metric(grid, |g| g.round_error);
    ex
}
