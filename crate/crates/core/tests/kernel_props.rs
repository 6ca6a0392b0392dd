use nalgebra::DMatrix;
use proptest::prelude::*;
use qzeno_core::kernel::{measure_projective, MeasureMode};
use qzeno_core::noise::{derive_channel, evolve};
use qzeno_core::{c, CouplingKind, CouplingSpec, DensityMatrix, Operator, Pauli, PureState, QubitRegister, C};

fn state_from(parts: &[(f64, f64)]) -> Option<PureState> {
    let n = parts.len().trailing_zeros() as usize;
    let amps: Vec<C> = parts.iter().map(|&(re, im)| c(re, im)).collect();
    let s = PureState::from_amplitudes(QubitRegister::system(n).ok()?, amps).ok()?;
    (s.norm_sqr() > 1e-6).then(|| s.normalized().unwrap())
}

fn hermitian(entries: &[(f64, f64)]) -> DMatrix<C> {
    let m = DMatrix::from_fn(4, 4, |i, j| {
        let (re, im) = entries[i * 4 + j];
        c(re, im)
    });
    (&m + m.adjoint()) * c(0.5, 0.0)
}

fn amps(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
}

proptest! {
    #[test]
    fn unitaries_preserve_the_norm(
        a in amps(3),
        h in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        t in 0.0f64..3.0,
        q in 0usize..3,
    ) {
        let Some(psi) = state_from(&a) else { return Ok(()) };
        let u = Operator::unitary(evolve(&hermitian(&h), t), "u").unwrap();
        let out = psi.apply(&u, &[q, (q + 1) % 3]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn channels_keep_density_matrices_valid(
        a in amps(2),
        eps in 0.0f64..0.5,
        seed in 0u64..1000,
        q in 0usize..2,
    ) {
        let Some(psi) = state_from(&a) else { return Ok(()) };
        let ch = derive_channel(&CouplingSpec::new(CouplingKind::Generic, eps, seed)).unwrap();
        prop_assert!(ch.completeness_deviation() < 1e-10);
        let rho = DensityMatrix::from_pure(&psi).apply_channel(&ch, &[q]).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_deviation() < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn partial_trace_keeps_the_trace(a in amps(3), keep in 0usize..3) {
        let Some(psi) = state_from(&a) else { return Ok(()) };
        let reduced = DensityMatrix::from_pure(&psi).partial_trace(&[keep]).unwrap();
        prop_assert_eq!(reduced.dim(), 2);
        prop_assert!((reduced.trace() - 1.0).abs() < 1e-10);
        prop_assert!(reduced.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn measurement_branches_are_complete(a in amps(3), q in 0usize..3) {
        let Some(psi) = state_from(&a) else { return Ok(()) };
        let p0 = Operator::projector(&[c(1.0, 0.0), c(0.0, 0.0)], "P0").unwrap();
        let p1 = Operator::projector(&[c(0.0, 0.0), c(1.0, 0.0)], "P1").unwrap();
        let projectors = [p0, p1];
        let mut total = 0.0;
        for k in 0..2 {
            // A branch below the kernel's probability floor is refused and counts as zero.
            if let Ok(m) = measure_projective(&psi, &projectors, &[q], MeasureMode::Forced(k)) {
                prop_assert!((m.state.norm_sqr() - 1.0).abs() < 1e-10);
                total += m.probability;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn paulis_are_involutions(a in amps(2), q in 0usize..2) {
        let Some(psi) = state_from(&a) else { return Ok(()) };
        for p in Pauli::ALL {
            let op = Operator::pauli(p);
            let back = psi.apply(&op, &[q]).unwrap().apply(&op, &[q]).unwrap();
            prop_assert!((back.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}
