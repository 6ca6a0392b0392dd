use nalgebra::DMatrix;
use qzeno_core::noise::{
    build_coupling_unitary, correlated_gadget_noise, derive_channel, evolve, random_generator, CouplingCoefficients,
};
use qzeno_core::{c, CouplingKind, CouplingSpec, DensityMatrix, PureState, QubitRegister, Role, C};

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn op_norm(m: &DMatrix<C>) -> f64 {
    m.map(|z| z.norm()).iter().fold(0.0, |a: f64, &b| a.max(b))
}

const EPSILONS: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

#[test]
fn channel_matches_explicit_environment() {
    let spec = CouplingSpec::new(CouplingKind::Generic, 0.07, 11);
    let u = build_coupling_unitary(&spec).unwrap();
    let ch = derive_channel(&spec).unwrap();
    let psi = PureState::from_amplitudes(QubitRegister::system(1).unwrap(), vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let env = PureState::qubit(c(1.0, 0.0), c(0.0, 0.0), Role::Environment);
    let joint = psi.tensor(&env).unwrap().apply(&u, &[0, 1]).unwrap();
    let explicit = DensityMatrix::from_pure(&joint).partial_trace(&[0]).unwrap();
    let via_channel = DensityMatrix::from_pure(&psi).apply_channel(&ch, &[0]).unwrap();
    let d = op_norm(&(explicit.matrix() - via_channel.matrix()));
    assert!(d < 1e-10, "{d}");
}

#[test]
fn coupling_orders_scale_with_epsilon() {
    for kind in [CouplingKind::Generic, CouplingKind::DephasingOnly, CouplingKind::FlipOnly] {
        let h = random_generator(kind, 5, 2);
        let mut dev = Vec::new();
        let mut gamma = Vec::new();
        for eps in EPSILONS {
            let u = evolve(&h, eps);
            dev.push((eps, op_norm(&(&u - DMatrix::identity(4, 4)))));
            let coeffs = CouplingCoefficients::of(&u, 2);
            assert!(coeffs.is_slow(eps), "{kind:?} at {eps}");
            gamma.push((eps, 1.0 - coeffs.gamma_min()));
        }
        let s1 = loglog_slope(&dev);
        assert!((s1 - 1.0).abs() <= 0.05, "{kind:?} |U-I| slope {s1}");
        let s2 = loglog_slope(&gamma);
        assert!((s2 - 2.0).abs() <= 0.1, "{kind:?} 1-|gamma| slope {s2}");
    }
}

#[test]
fn channels_on_different_qubits_commute() {
    let a = derive_channel(&CouplingSpec::new(CouplingKind::Generic, 0.2, 1)).unwrap();
    let b = derive_channel(&CouplingSpec::new(CouplingKind::Generic, 0.2, 2)).unwrap();
    let amps = vec![c(0.5, 0.1), c(-0.3, 0.4), c(0.2, -0.5), c(0.4, 0.2)];
    let psi = PureState::from_amplitudes(QubitRegister::system(2).unwrap(), amps).unwrap().normalized().unwrap();
    let rho = DensityMatrix::from_pure(&psi);
    let ab = rho.apply_channel(&a, &[0]).unwrap().apply_channel(&b, &[1]).unwrap();
    let ba = rho.apply_channel(&b, &[1]).unwrap().apply_channel(&a, &[0]).unwrap();
    assert!(op_norm(&(ab.matrix() - ba.matrix())) < 1e-12);
}

#[test]
fn step_moves_states_by_order_epsilon() {
    let psi = PureState::from_amplitudes(QubitRegister::system(2).unwrap(), vec![c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8), c(0.0, 0.0)])
        .unwrap();
    for eps in EPSILONS {
        let u = build_coupling_unitary(&CouplingSpec::new(CouplingKind::Generic, eps, 3)).unwrap();
        let moved = psi.apply(&u, &[0, 1]).unwrap();
        let diff = moved.add_scaled(c(-1.0, 0.0), &psi).unwrap().norm_sqr().sqrt();
        assert!(diff <= 1.01 * eps, "{diff} at {eps}");
    }
}

#[test]
fn generic_channel_loses_purity_at_second_order() {
    let plus = PureState::from_amplitudes(
        QubitRegister::system(1).unwrap(),
        vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)],
    )
    .unwrap();
    let drops: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3]
        .into_iter()
        .map(|eps| {
            let ch = derive_channel(&CouplingSpec::new(CouplingKind::Generic, eps, 7)).unwrap();
            let rho = DensityMatrix::from_pure(&plus).apply_channel(&ch, &[0]).unwrap();
            (eps, 1.0 - rho.purity())
        })
        .collect();
    assert!(drops.iter().all(|&(_, d)| d > 0.0));
    let s = loglog_slope(&drops);
    assert!((s - 2.0).abs() < 0.1, "{s}");
}

#[test]
fn dephasing_channel_keeps_populations() {
    let ch = derive_channel(&CouplingSpec::new(CouplingKind::DephasingOnly, 0.3, 9)).unwrap();
    let psi = PureState::from_amplitudes(QubitRegister::system(1).unwrap(), vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
    let rho = DensityMatrix::from_pure(&psi).apply_channel(&ch, &[0]).unwrap();
    assert!((rho.matrix()[(0, 0)].re - 0.36).abs() < 1e-12);
    assert!((rho.matrix()[(1, 1)].re - 0.64).abs() < 1e-12);
}

#[test]
fn gadget_noise_is_a_weak_two_qubit_unitary() {
    let u = correlated_gadget_noise(&CouplingSpec::new(CouplingKind::DephasingOnly, 0.05, 3)).unwrap();
    assert_eq!(u.arity(), 2);
    assert!(u.unitarity_deviation() < 1e-12);
    let d = op_norm(&(u.matrix() - DMatrix::identity(4, 4)));
    assert!(d > 0.0 && d <= 0.05 * 1.01);
}
