use nalgebra::DMatrix;
use rand::{Rng, RngCore};

use super::density::DensityMatrix;
use super::operator::{max_abs_diff, Operator};
use super::state::PureState;
use super::{C, MIN_BRANCH_PROB, PROJECTOR_TOL};
use crate::error::{Error, Result};

/// How a measurement picks its outcome.
pub enum MeasureMode<'a> {
    /// Draw the outcome with Born probabilities.
    Sampled(&'a mut dyn RngCore),
    /// Take the given outcome branch and report its probability.
    Forced(usize),
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: usize,
    /// Post-measurement state, renormalized.
    pub state: PureState,
    pub probability: f64,
}

/// Projective measurement with local projectors acting on `targets`.
///
/// The projectors must be complete and mutually orthogonal within 1e-8.
pub fn measure_projective(
    state: &PureState,
    projectors: &[Operator],
    targets: &[usize],
    mode: MeasureMode<'_>,
) -> Result<Measurement> {
    validate_projectors(projectors)?;
    let branches = projectors
        .iter()
        .map(|p| state.apply(p, targets))
        .collect::<Result<Vec<_>>>()?;
    let probs: Vec<f64> = branches.iter().map(PureState::norm_sqr).collect();
    let outcome = match mode {
        MeasureMode::Forced(k) => {
            if k >= projectors.len() {
                return Err(Error::invalid(
                    "outcome",
                    format!("{k} >= {} projectors", projectors.len()),
                ));
            }
            if probs[k] < MIN_BRANCH_PROB {
                return Err(Error::ZeroProbabilityBranch {
                    probability: probs[k],
                });
            }
            k
        }
        MeasureMode::Sampled(rng) => sample_index(&probs, rng),
    };
    let probability = probs[outcome];
    let state = branches
        .into_iter()
        .nth(outcome)
        .expect("outcome within range")
        .normalized()?;
    Ok(Measurement {
        outcome,
        state,
        probability,
    })
}

/// Index drawn from (possibly slightly unnormalized) weights.
pub(crate) fn sample_index(weights: &[f64], rng: &mut dyn RngCore) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // rounding fell off the end: take the last branch with nonzero weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn validate_projectors(projectors: &[Operator]) -> Result<()> {
    let first = projectors
        .first()
        .ok_or_else(|| Error::InvalidProjectors("empty projector list".into()))?;
    let d = first.dim();
    if projectors.iter().any(|p| p.dim() != d) {
        return Err(Error::InvalidProjectors("projectors differ in size".into()));
    }
    let sum = projectors
        .iter()
        .fold(DMatrix::<C>::zeros(d, d), |acc, p| acc + p.matrix());
    let dev = max_abs_diff(&sum, &DMatrix::identity(d, d));
    if dev > PROJECTOR_TOL {
        return Err(Error::InvalidProjectors(format!(
            "sum deviates from identity by {dev:.3e}"
        )));
    }
    for (i, pi) in projectors.iter().enumerate() {
        for (j, pj) in projectors.iter().enumerate() {
            let prod = pi.matrix() * pj.matrix();
            let expect = if i == j {
                pi.matrix().clone()
            } else {
                DMatrix::zeros(d, d)
            };
            let dev = max_abs_diff(&prod, &expect);
            if dev > PROJECTOR_TOL {
                return Err(Error::InvalidProjectors(format!(
                    "P{i} P{j} deviates by {dev:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Fidelity of a state (pure or mixed) with a pure reference state.
pub trait Fidelity {
    /// `|<a|b>|^2` for pure `a`, `<b|rho|b>` for mixed `rho`.
    fn fidelity_with(&self, reference: &PureState) -> Result<f64>;
}

impl Fidelity for PureState {
    fn fidelity_with(&self, reference: &PureState) -> Result<f64> {
        Ok(self.inner(reference)?.norm_sqr().clamp(0.0, 1.0))
    }
}

impl Fidelity for DensityMatrix {
    fn fidelity_with(&self, reference: &PureState) -> Result<f64> {
        Ok(self.expectation_in(reference)?.clamp(0.0, 1.0))
    }
}

pub fn fidelity<S: Fidelity + ?Sized>(a: &S, b: &PureState) -> Result<f64> {
    a.fidelity_with(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::register::QubitRegister;
    use crate::kernel::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z_basis() -> Vec<Operator> {
        vec![
            Operator::projector(&[c(1.0, 0.0), c(0.0, 0.0)], "P0").unwrap(),
            Operator::projector(&[c(0.0, 0.0), c(1.0, 0.0)], "P1").unwrap(),
        ]
    }

    fn reg1() -> QubitRegister {
        QubitRegister::system(1).unwrap()
    }

    #[test]
    fn measuring_zero_is_certain() {
        let s = PureState::basis(reg1(), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = measure_projective(&s, &z_basis(), &[0], MeasureMode::Sampled(&mut rng)).unwrap();
        assert_eq!(m.outcome, 0);
        assert_eq!(m.probability, 1.0);
    }

    #[test]
    fn plus_gives_halves() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let s = PureState::from_amplitudes(reg1(), vec![h, h]).unwrap();
        for k in 0..2 {
            let m = measure_projective(&s, &z_basis(), &[0], MeasureMode::Forced(k)).unwrap();
            assert!((m.probability - 0.5).abs() < 1e-15);
            assert!((m.state.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn forced_zero_branch_is_rejected() {
        let s = PureState::basis(reg1(), 0).unwrap();
        assert!(matches!(
            measure_projective(&s, &z_basis(), &[0], MeasureMode::Forced(1)),
            Err(Error::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn incomplete_projectors_are_rejected() {
        let s = PureState::basis(reg1(), 0).unwrap();
        let only = vec![z_basis().remove(0)];
        assert!(matches!(
            measure_projective(&s, &only, &[0], MeasureMode::Forced(0)),
            Err(Error::InvalidProjectors(_))
        ));
    }

    #[test]
    fn fidelities() {
        let zero = PureState::basis(reg1(), 0).unwrap();
        let one = PureState::basis(reg1(), 1).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(reg1());
        assert!((fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-15);
        let two = PureState::basis(QubitRegister::system(2).unwrap(), 0).unwrap();
        assert!(fidelity(&zero, &two).is_err());
    }
}
