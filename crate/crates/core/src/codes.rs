//! The error prevention codes and brute-force tools for analysing them.
//!
//! Three encodings are provided, all written in the kernel's big-endian
//! basis convention:
//!
//! | name | physical | logical | codewords |
//! |------|----------|---------|-----------|
//! | `four_particle` | 4 | 1 | `(00±11)(00±11)/2` |
//! | `four_particle_two_logical` | 4 | 2 | adds `(01±10)(01±10)/2` |
//! | `two_particle_dephasing` | 2 | 1 | `(00+11)/√2`, `(01+10)/√2` |
//!
//! Single-qubit errors are the Paulis X, Y, Z on each physical qubit; global
//! phases are ignored everywhere.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{c, DensityMatrix, Operator, Pauli, PureState, QubitRegister, C};
use crate::seeds::{rng_for, Stream};

/// Overlap below which two states count as orthogonal.
pub const ORTHO_TOL: f64 = 1e-10;
/// Overlap modulus above which two normalized states count as identical.
pub const SAME_STATE_TOL: f64 = 1e-10;
/// Orthonormality tolerance for user-supplied codewords.
pub const INPUT_ORTHONORMAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeName {
    FourParticle,
    FourParticleTwoLogical,
    TwoParticleDephasing,
}

impl CodeName {
    pub const ALL: [CodeName; 3] = [
        CodeName::FourParticle,
        CodeName::FourParticleTwoLogical,
        CodeName::TwoParticleDephasing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeName::FourParticle => "four_particle",
            CodeName::FourParticleTwoLogical => "four_particle_two_logical",
            CodeName::TwoParticleDephasing => "two_particle_dephasing",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CodeName::FourParticle => "one logical qubit in four particles, two Bell doublets",
            CodeName::FourParticleTwoLogical => "two logical qubits in four particles",
            CodeName::TwoParticleDephasing => "one logical qubit in two particles, dephasing noise only",
        }
    }
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CodeName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownCode(s.to_string()))
    }
}

/// A set of orthonormal codewords and the projector onto their span.
#[derive(Clone, Debug)]
pub struct Code {
    name: String,
    codewords: Vec<PureState>,
    projector: Operator,
}

impl Code {
    /// Builds a code from arbitrary orthonormal codewords (within 1e-8).
    pub fn from_codewords(name: impl Into<String>, codewords: Vec<PureState>) -> Result<Self> {
        check_orthonormal(&codewords, INPUT_ORTHONORMAL_TOL)?;
        let dim = codewords[0].dim();
        let projector = codewords.iter().fold(DMatrix::<C>::zeros(dim, dim), |acc, w| {
            let v = w.amplitudes();
            acc + v * v.adjoint()
        });
        Ok(Self {
            name: name.into(),
            projector: Operator::new(projector, "P_code")?,
            codewords,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_physical(&self) -> usize {
        self.codewords[0].num_qubits()
    }

    pub fn codewords(&self) -> &[PureState] {
        &self.codewords
    }

    pub fn codeword(&self, i: usize) -> &PureState {
        &self.codewords[i]
    }

    /// Number of logical qubits; the codeword count must be a power of two.
    pub fn n_logical(&self) -> usize {
        self.codewords.len().trailing_zeros() as usize
    }

    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    pub fn physical_register(&self) -> &QubitRegister {
        self.codewords[0].register()
    }

    /// `P|psi>`, unnormalized.
    pub fn project(&self, state: &PureState) -> Result<PureState> {
        let targets: Vec<usize> = (0..self.n_physical()).collect();
        state.apply(&self.projector, &targets)
    }

    /// `tr(P rho)`.
    pub fn code_weight(&self, rho: &DensityMatrix) -> Result<f64> {
        self.codewords
            .iter()
            .map(|w| rho.expectation_in(w))
            .sum()
    }
}

/// Normalized two-qubit doublet `(|ab> + sign |(1-a)(1-b)>) / sqrt2`.
fn doublet(odd: bool, sign: f64) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 4];
    let (first, second) = if odd { (0b01, 0b10) } else { (0b00, 0b11) };
    amps[first] = c(h, 0.0);
    amps[second] = c(sign * h, 0.0);
    PureState::from_amplitudes(QubitRegister::system(2).expect("2 qubits"), amps)
        .expect("dimension 4")
}

fn doublet_pair(odd: bool, sign: f64) -> PureState {
    doublet(odd, sign)
        .tensor(&doublet(odd, sign))
        .expect("4 qubits fit")
}

pub fn make_code(name: CodeName) -> Code {
    let words = match name {
        CodeName::FourParticle => vec![doublet_pair(false, 1.0), doublet_pair(false, -1.0)],
        CodeName::FourParticleTwoLogical => vec![
            doublet_pair(false, 1.0),
            doublet_pair(false, -1.0),
            doublet_pair(true, 1.0),
            doublet_pair(true, -1.0),
        ],
        CodeName::TwoParticleDephasing => vec![doublet(false, 1.0), doublet(true, 1.0)],
    };
    Code::from_codewords(name.as_str(), words).expect("built-in codewords are orthonormal")
}

/// `sum_i a_i |i_E>` for a logical state with amplitudes `a_i`.
pub fn encode(code: &Code, logical: &PureState) -> Result<PureState> {
    if logical.dim() != code.codewords.len() {
        return Err(Error::DimensionMismatch {
            expected: code.codewords.len(),
            found: logical.dim(),
        });
    }
    let zero = code.codewords[0].clone().scaled(c(0.0, 0.0));
    code.codewords
        .iter()
        .zip(logical.amplitudes().iter())
        .try_fold(zero, |acc, (w, a)| acc.add_scaled(*a, w))
}

/// Logical density matrix recovered from a physical state.
#[derive(Clone, Debug)]
pub struct Decoded {
    /// `<i_E|rho|j_E>` renormalized to unit trace; `None` when the state has
    /// no weight in the code space.
    pub logical: Option<DensityMatrix>,
    /// `1 - tr(P rho)`.
    pub leakage: f64,
}

pub fn decode(code: &Code, physical: &DensityMatrix) -> Result<Decoded> {
    if physical.dim() != code.codewords[0].dim() {
        return Err(Error::DimensionMismatch {
            expected: code.codewords[0].dim(),
            found: physical.dim(),
        });
    }
    let total = physical.trace();
    let k = code.codewords.len();
    let m = physical.matrix();
    let block = DMatrix::from_fn(k, k, |i, j| {
        let wi = code.codewords[i].amplitudes();
        let wj = code.codewords[j].amplitudes();
        wi.dotc(&(m * wj))
    });
    let weight = block.trace().re / total;
    let leakage = (1.0 - weight).max(0.0);
    if leakage > 1.0 - 1e-12 {
        return Ok(Decoded {
            logical: None,
            leakage,
        });
    }
    let register = QubitRegister::system(code.n_logical().max(1))?;
    let logical = DensityMatrix::from_matrix(register, block)?.normalized()?;
    Ok(Decoded {
        logical: Some(logical),
        leakage,
    })
}

pub fn decode_pure(code: &Code, physical: &PureState) -> Result<Decoded> {
    decode(code, &DensityMatrix::from_pure(physical))
}

/// One single-qubit Pauli error applied to a codeword.
#[derive(Clone, Debug)]
pub struct OrbitEntry {
    pub pauli: Pauli,
    /// 0-based physical qubit.
    pub qubit: usize,
    pub state: PureState,
}

impl OrbitEntry {
    /// Label with 1-based particle numbering, e.g. `X1`.
    pub fn label(&self) -> String {
        format!("{}{}", self.pauli, self.qubit + 1)
    }
}

/// Everything single-qubit errors do to one codeword.
#[derive(Clone, Debug)]
pub struct ErrorOrbitReport {
    pub source: usize,
    /// All `3 n` errors ordered by label (X1..Xn, Y1..Yn, Z1..Zn).
    pub orbit: Vec<OrbitEntry>,
    /// Gram matrix of `orbit`.
    pub gram: DMatrix<C>,
    /// Indices into `orbit` of states distinct up to global phase.
    pub distinct: Vec<usize>,
    /// Greedy maximal mutually-orthogonal subset of `distinct`.
    pub orthogonal: Vec<usize>,
    pub orthogonal_count: usize,
    /// Orthogonal states also orthogonal to every codeword and to every error
    /// state of lower-indexed codewords: what this codeword adds to the
    /// space the code already occupies.
    pub new_states: Vec<usize>,
    /// `max |<j_E| E |i_E>|` over errors `E` and codewords `j != i`.
    pub overlaps_with_other_codewords: f64,
}

fn single_qubit_errors(n: usize) -> impl Iterator<Item = (Pauli, usize)> {
    Pauli::ALL
        .into_iter()
        .flat_map(move |p| (0..n).map(move |q| (p, q)))
}

fn orbit_of(word: &PureState) -> Result<Vec<OrbitEntry>> {
    single_qubit_errors(word.num_qubits())
        .map(|(pauli, qubit)| {
            Ok(OrbitEntry {
                pauli,
                qubit,
                state: word.apply(&Operator::pauli(pauli), &[qubit])?,
            })
        })
        .collect()
}

pub fn error_orbit(code: &Code, index: usize) -> Result<ErrorOrbitReport> {
    if index >= code.codewords.len() {
        return Err(Error::invalid(
            "codeword index",
            format!("{index} >= {} codewords", code.codewords.len()),
        ));
    }
    let orbit = orbit_of(&code.codewords[index])?;
    let n = orbit.len();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        orbit[i].state.inner(&orbit[j].state).expect("same register")
    });

    let mut distinct: Vec<usize> = Vec::new();
    for i in 0..n {
        if distinct
            .iter()
            .all(|&j| gram[(i, j)].norm() <= 1.0 - SAME_STATE_TOL)
        {
            distinct.push(i);
        }
    }
    let mut orthogonal: Vec<usize> = Vec::new();
    for &i in &distinct {
        if orthogonal.iter().all(|&j| gram[(i, j)].norm() <= ORTHO_TOL) {
            orthogonal.push(i);
        }
    }

    let mut occupied: Vec<PureState> = code.codewords.clone();
    for lower in 0..index {
        occupied.extend(orbit_of(&code.codewords[lower])?.into_iter().map(|e| e.state));
    }
    let mut new_states: Vec<usize> = Vec::new();
    for &i in &orthogonal {
        let s = &orbit[i].state;
        let clear_of_occupied = occupied
            .iter()
            .all(|o| o.inner(s).map(|v| v.norm() <= ORTHO_TOL).unwrap_or(false));
        if clear_of_occupied {
            new_states.push(i);
        }
    }

    let mut overlaps: f64 = 0.0;
    for (_, w) in code.codewords.iter().enumerate().filter(|(j, _)| *j != index) {
        for e in &orbit {
            overlaps = overlaps.max(w.inner(&e.state)?.norm());
        }
    }

    Ok(ErrorOrbitReport {
        source: index,
        orthogonal_count: orthogonal.len(),
        orbit,
        gram,
        distinct,
        orthogonal,
        new_states,
        overlaps_with_other_codewords: overlaps,
    })
}

/// A single-qubit error together with the matrix element it produces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub error: String,
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

/// Outcome of [`check_prevention_condition`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreventionReport {
    /// No single-qubit error connects two different codewords.
    pub pass: bool,
    /// `max |<j|E|i>|` over `i != j`.
    pub worst_overlap: f64,
    /// The error and codeword pair attaining `worst_overlap`, when it fails.
    pub witness: Option<Witness>,
    /// Largest first-order action of an error inside the code space:
    /// `max_E || PEP - (tr(PEP)/k) P ||`. Zero means every single-qubit error
    /// is either detected or harmless; the pairwise condition alone does not
    /// rule out errors that shift relative phases between codewords.
    pub logical_drift: f64,
    pub drift_witness: Option<String>,
}

impl PreventionReport {
    /// Pairwise condition and in-subspace drift both vanish.
    pub fn detects_all(&self) -> bool {
        self.pass && self.logical_drift <= ORTHO_TOL
    }
}

fn check_orthonormal(words: &[PureState], tol: f64) -> Result<()> {
    let first = words
        .first()
        .ok_or_else(|| Error::invalid("codewords", "at least one codeword is required"))?;
    let mut deviation: f64 = 0.0;
    for (i, a) in words.iter().enumerate() {
        if a.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: a.dim(),
            });
        }
        for b in &words[i..] {
            let expect = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            deviation = deviation.max((a.inner(b)? - c(expect, 0.0)).norm());
        }
    }
    if deviation > tol {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(())
}

/// Checks that no single-qubit Pauli maps one codeword onto another.
pub fn check_prevention_condition(codewords: &[PureState]) -> Result<PreventionReport> {
    check_orthonormal(codewords, INPUT_ORTHONORMAL_TOL)?;
    let n = codewords[0].num_qubits();
    let k = codewords.len();
    let mut worst: Option<Witness> = None;
    let mut drift: f64 = 0.0;
    let mut drift_witness = None;
    for (pauli, qubit) in single_qubit_errors(n) {
        let op = Operator::pauli(pauli);
        let images = codewords
            .iter()
            .map(|w| w.apply(&op, &[qubit]))
            .collect::<Result<Vec<_>>>()?;
        let block = DMatrix::from_fn(k, k, |j, i| codewords[j].inner(&images[i]).expect("same dim"));
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let value = block[(j, i)].norm();
                if worst.as_ref().map_or(true, |w| value > w.value) {
                    worst = Some(Witness {
                        error: format!("{pauli}{}", qubit + 1),
                        from: i,
                        to: j,
                        value,
                    });
                }
            }
        }
        let shift = block.trace() / k as f64;
        let centered = DMatrix::from_fn(k, k, |r, col| {
            block[(r, col)] - if r == col { shift } else { c(0.0, 0.0) }
        });
        let norm = centered
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.abs()));
        if norm > drift {
            drift = norm;
            drift_witness = Some(format!("{pauli}{}", qubit + 1));
        }
    }
    let worst_overlap = worst.as_ref().map_or(0.0, |w| w.value);
    let pass = worst_overlap <= ORTHO_TOL;
    Ok(PreventionReport {
        pass,
        worst_overlap,
        witness: if pass { None } else { worst },
        logical_drift: drift,
        drift_witness: if drift > ORTHO_TOL { drift_witness } else { None },
    })
}

/// Result of a randomized search over three-qubit two-codeword encodings.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub trials: u64,
    pub seed: u64,
    /// Smallest violation `max(worst_overlap, logical_drift)` seen.
    pub min_violation: f64,
    pub best_candidate: Vec<PureState>,
    /// The repetition code `{|000>, |111>}`, evaluated for reference.
    pub repetition: PreventionReport,
}

/// `max(worst_overlap, logical_drift)`: zero only for a code whose code
/// space is left untouched, to first order, by every single-qubit error.
pub fn violation(report: &PreventionReport) -> f64 {
    report.worst_overlap.max(report.logical_drift)
}

fn random_orthonormal_pair(rng: &mut dyn RngCore) -> Vec<PureState> {
    let reg = QubitRegister::system(3).expect("3 qubits");
    let mut draw = || -> f64 { StandardNormal.sample(&mut *rng) };
    let mut gauss = || {
        PureState::from_amplitudes(reg.clone(), (0..8).map(|_| c(draw(), draw())).collect())
            .expect("dimension 8")
    };
    let a = gauss().normalized().expect("nonzero gaussian vector");
    let b = gauss();
    let proj = a.inner(&b).expect("same dim");
    let b = b.add_scaled(-proj, &a).expect("same dim").normalized().expect("independent");
    vec![a, b]
}

/// Samples `trials` random orthonormal pairs in three qubits and records the
/// best one found. Evidence only: a positive minimum is not a proof.
pub fn search_three_qubit_codes(trials: u64, seed: u64) -> Result<SearchReport> {
    if trials == 0 {
        return Err(Error::invalid("trials", "at least one trial is required"));
    }
    let reg = QubitRegister::system(3)?;
    let repetition = check_prevention_condition(&[
        PureState::from_label(reg.clone(), "000")?,
        PureState::from_label(reg, "111")?,
    ])?;
    let mut rng = rng_for(seed, Stream::Search, 0);
    let mut best = (f64::INFINITY, Vec::new());
    for _ in 0..trials {
        let pair = random_orthonormal_pair(&mut rng);
        let v = violation(&check_prevention_condition(&pair)?);
        if v < best.0 {
            best = (v, pair);
        }
    }
    Ok(SearchReport {
        trials,
        seed,
        min_violation: best.0,
        best_candidate: best.1,
        repetition,
    })
}

/// Parses codewords written as a JSON array of arrays of `[re, im]` pairs,
/// one inner array per codeword, in the kernel's basis order.
pub fn codewords_from_json(text: &str) -> Result<Vec<PureState>> {
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)?;
    if raw.is_empty() {
        return Err(Error::invalid("codewords", "empty codeword list"));
    }
    raw.into_iter()
        .enumerate()
        .map(|(i, amps)| {
            let len = amps.len();
            if len < 2 || !len.is_power_of_two() {
                return Err(Error::invalid(
                    "codewords",
                    format!("codeword {i} has {len} amplitudes, not a power of two >= 2"),
                ));
            }
            let reg = QubitRegister::system(len.trailing_zeros() as usize)?;
            PureState::from_amplitudes(reg, amps.into_iter().map(|[re, im]| c(re, im)).collect())
        })
        .collect()
}

pub fn codewords_to_json(words: &[PureState]) -> serde_json::Value {
    serde_json::Value::Array(
        words
            .iter()
            .map(|w| {
                serde_json::json!(w
                    .amplitudes()
                    .iter()
                    .map(|a| [a.re, a.im])
                    .collect::<Vec<_>>())
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{fidelity, max_abs_diff};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn codeword_amplitudes() {
        let four = make_code(CodeName::FourParticle);
        assert!((four.codeword(0).amplitude(0b0000) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(four.codeword(0).inner(four.codeword(1)).unwrap().norm() < 1e-15);
        let deph = make_code(CodeName::TwoParticleDephasing);
        assert!((deph.codeword(1).amplitude(0b01) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let two = make_code(CodeName::FourParticleTwoLogical);
        // |3_E> = (01-10)(01-10)/2 has +1/2 at |0101> and -1/2 at |0110>
        assert!((two.codeword(3).amplitude(0b0101) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((two.codeword(3).amplitude(0b0110) - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(two.n_logical(), 2);
    }

    #[test]
    fn names_parse() {
        for n in CodeName::ALL {
            assert_eq!(n.as_str().parse::<CodeName>().unwrap(), n);
        }
        assert!(matches!("five".parse::<CodeName>(), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn encode_examples() {
        let code = make_code(CodeName::FourParticle);
        let reg = QubitRegister::system(1).unwrap();
        let zero = PureState::basis(reg.clone(), 0).unwrap();
        assert_eq!(encode(&code, &zero).unwrap(), *code.codeword(0));

        let h = c(FRAC_1_SQRT_2, 0.0);
        let plus = PureState::from_amplitudes(reg, vec![h, h]).unwrap();
        let enc = encode(&code, &plus).unwrap();
        // (|0_E> + |1_E>)/sqrt2 keeps |0000>, |1111> (doubled) and drops the
        // cross terms: amplitude 1/sqrt2 on 0000 and 1111, zero elsewhere.
        let expect = |i: usize| match i {
            0b0000 | 0b1111 => FRAC_1_SQRT_2,
            _ => 0.0,
        };
        for i in 0..16 {
            assert!((enc.amplitude(i) - c(expect(i), 0.0)).norm() < 1e-15, "index {i}");
        }

        let two = make_code(CodeName::FourParticleTwoLogical);
        let l11 = PureState::from_label(QubitRegister::system(2).unwrap(), "11").unwrap();
        assert_eq!(encode(&two, &l11).unwrap(), *two.codeword(3));
        assert!(matches!(encode(&two, &plus), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn decode_examples() {
        let code = make_code(CodeName::FourParticle);
        let x1 = code.codeword(0).apply(&Operator::pauli(Pauli::X), &[0]).unwrap();
        let d = decode_pure(&code, &x1).unwrap();
        assert!(d.logical.is_none());
        assert!((d.leakage - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(QubitRegister::system(4).unwrap());
        let d = decode(&code, &mixed).unwrap();
        assert!((d.leakage - (1.0 - 2.0 / 16.0)).abs() < 1e-14);
        let half = DensityMatrix::maximally_mixed(QubitRegister::system(1).unwrap());
        assert!(max_abs_diff(d.logical.unwrap().matrix(), half.matrix()) < 1e-14);

        let logical = PureState::from_amplitudes(
            QubitRegister::system(1).unwrap(),
            vec![c(0.6, 0.0), c(0.0, 0.8)],
        )
        .unwrap();
        let d = decode_pure(&code, &encode(&code, &logical).unwrap()).unwrap();
        assert!(d.leakage.abs() < 1e-14);
        assert!((fidelity(&d.logical.unwrap(), &logical).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orbit_counts_for_four_particle_code() {
        let code = make_code(CodeName::FourParticle);
        let zero = error_orbit(&code, 0).unwrap();
        assert_eq!(zero.orbit.len(), 12);
        assert_eq!(zero.distinct.len(), 6);
        assert_eq!(zero.orthogonal_count, 6);
        assert_eq!(zero.new_states.len(), 6);
        let one = error_orbit(&code, 1).unwrap();
        assert_eq!(one.orthogonal_count, 6);
        assert_eq!(one.new_states.len(), 4);
        for r in [&zero, &one] {
            assert!(r.overlaps_with_other_codewords < 1e-12);
            for i in 0..12 {
                assert!((r.gram[(i, i)].re - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(zero.orbit[0].label(), "X1");
        assert_eq!(zero.orbit[11].label(), "Z4");
        assert!(error_orbit(&code, 2).is_err());
    }

    #[test]
    fn prevention_condition_examples() {
        assert!(check_prevention_condition(make_code(CodeName::FourParticle).codewords())
            .unwrap()
            .detects_all());
        assert!(check_prevention_condition(make_code(CodeName::FourParticleTwoLogical).codewords())
            .unwrap()
            .pass);
        let deph = check_prevention_condition(make_code(CodeName::TwoParticleDephasing).codewords()).unwrap();
        assert!(!deph.pass);
        let w = deph.witness.unwrap();
        assert!(w.error.starts_with('X'));
        assert!((w.value - 1.0).abs() < 1e-12);

        let reg = QubitRegister::system(3).unwrap();
        let rep = check_prevention_condition(&[
            PureState::from_label(reg.clone(), "000").unwrap(),
            PureState::from_label(reg, "111").unwrap(),
        ])
        .unwrap();
        // pairwise condition holds, but Z on any qubit is a logical phase flip
        assert!(rep.pass);
        assert!((rep.logical_drift - 1.0).abs() < 1e-12);
        assert!(!rep.detects_all());
    }

    #[test]
    fn non_orthonormal_input_is_rejected() {
        let reg = QubitRegister::system(1).unwrap();
        let z = PureState::basis(reg, 0).unwrap();
        assert!(matches!(
            check_prevention_condition(&[z.clone(), z]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn search_precondition() {
        assert!(search_three_qubit_codes(0, 1).is_err());
        let r = search_three_qubit_codes(50, 1).unwrap();
        assert!(r.min_violation > 0.0);
        assert_eq!(r.best_candidate.len(), 2);
        assert!(r.repetition.pass);
    }

    #[test]
    fn json_codewords() {
        let text = r#"[[[0.5,0],[0,0],[0,0],[0.5,0],[0,0],[0,0],[0,0],[0,0],
                        [0,0],[0,0],[0,0],[0,0],[0.5,0],[0,0],[0,0],[0.5,0]],
                       [[0.5,0],[0,0],[0,0],[-0.5,0],[0,0],[0,0],[0,0],[0,0],
                        [0,0],[0,0],[0,0],[0,0],[-0.5,0],[0,0],[0,0],[0.5,0]]]"#;
        let words = codewords_from_json(text).unwrap();
        for (w, e) in words.iter().zip(make_code(CodeName::FourParticle).codewords()) {
            assert!((w.inner(e).unwrap().re - 1.0).abs() < 1e-12);
        }
        let back = codewords_from_json(&codewords_to_json(&words).to_string()).unwrap();
        assert_eq!(back, words);
        assert!(codewords_from_json("[[[1,0],[0,0],[0,0]]]").is_err());
        assert!(codewords_from_json("{").is_err());
    }
}
