use qzeno_core::experiments::{run_experiment, ExperimentResult, ExperimentSpec};

fn spec(body: &str) -> ExperimentSpec {
    ExperimentSpec::from_json(body).unwrap()
}

fn run(body: &str) -> ExperimentResult {
    run_experiment(&spec(body)).unwrap()
}

fn zeno(mode: &str, theta: f64, extra: &str) -> String {
    format!(
        r#"{{"name": "t", "experiment": "zeno_sweep", "code": "four_particle",
            "noise": {{"kind": "generic"}}, "gadget": {{"mode": "{mode}"}},
            "N_grid": [4, 8, 16], "thetaT": {theta}, "seeds": [1, 2]{extra}}}"#
    )
}

#[test]
fn zero_coupling_gives_perfect_fidelity_for_every_experiment() {
    let bodies = [
        zeno("postselect", 0.0, ""),
        zeno("nonselective", 0.0, "").replace("zeno_sweep", "unprotected_baseline"),
        r#"{"name": "t", "experiment": "fast_noise_failure", "code": "four_particle",
            "noise": {"kind": "kick", "p": 0.0, "kicks_per_run": 2},
            "N_grid": [4, 8, 16], "thetaT": 0.0, "seeds": [1]}"#
            .to_string(),
        r#"{"name": "t", "experiment": "gadget_noise_failure", "code": "four_particle",
            "noise": {"kind": "generic"}, "gadget_noise": {"epsilon": 0.0},
            "N_grid": [4, 8, 16], "thetaT": 0.0, "seeds": [1]}"#
            .to_string(),
        r#"{"name": "t", "experiment": "dephasing_code", "code": "two_particle_dephasing",
            "noise": {"kind": "dephasing_only"}, "gadget": {"mode": "postselect"},
            "N_grid": [4, 8, 16], "thetaT": 0.0, "seeds": [1]}"#
            .to_string(),
    ];
    for body in bodies {
        let r = run(&body);
        for p in &r.grid {
            assert!((p.fidelity - 1.0).abs() < 1e-12, "{}: N={} F={}", r.experiment.as_str(), p.n, p.fidelity);
            assert!(p.leakage < 1e-12);
        }
    }
}

#[test]
fn protection_beats_no_protection_at_large_n() {
    let protected = run(&zeno("nonselective", 0.5, ""));
    let bare = run(&zeno("nonselective", 0.5, "").replace("zeno_sweep", "unprotected_baseline"));
    let n = 16;
    let (p, b) = (protected.point(n).unwrap(), bare.point(n).unwrap());
    assert!(p.fidelity > b.fidelity, "{} vs {}", p.fidelity, b.fidelity);
    assert!(b.fidelity < 1.0);
}

#[test]
fn unprotected_run_decays() {
    let r = run(&zeno("nonselective", 0.5, "").replace("zeno_sweep", "unprotected_baseline"));
    assert!(r.grid.iter().all(|p| p.fidelity < 1.0 - 1e-4));
}

fn gadget_noise(eps: f64) -> String {
    format!(
        r#"{{"name": "g", "experiment": "gadget_noise_failure", "code": "four_particle",
            "noise": {{"kind": "generic"}}, "gadget_noise": {{"epsilon": {eps}}},
            "N_grid": [4, 8, 16, 32, 64, 128], "thetaT": 0.3, "seeds": [1, 2]}}"#
    )
}

#[test]
fn stronger_gadget_noise_moves_the_optimum_down() {
    let weak = run(&gadget_noise(0.01)).extras.optimum_n.unwrap();
    let strong = run(&gadget_noise(0.02)).extras.optimum_n.unwrap();
    assert!(strong <= weak, "{strong} > {weak}");
}

#[test]
fn vanishing_gadget_noise_matches_the_plain_sweep() {
    let noisy = run(&gadget_noise(0.0));
    let plain = run(
        &gadget_noise(0.0)
            .replace("gadget_noise_failure", "zeno_sweep")
            .replace(r#""gadget_noise": {"epsilon": 0}, "#, ""),
    );
    for (a, b) in noisy.records.iter().zip(&plain.records) {
        assert_eq!((a.n, a.seed), (b.n, b.seed));
        assert!((a.fidelity - b.fidelity).abs() < 1e-12);
    }
}

#[test]
fn trajectories_with_postselection_run() {
    let body = zeno("postselect", 0.3, r#", "simulation": {"mode": "trajectories", "trajectories": 50}"#);
    let r = run(&body);
    for rec in &r.records {
        assert!(rec.fidelity > 0.9 && rec.fidelity <= 1.0 + 1e-12);
        assert!(rec.fidelity_stderr.is_some());
    }
}

#[test]
fn random_and_repeated_test_particles_are_supported() {
    let body = zeno("postselect", 0.3, "").replace(
        r#""gadget": {"mode": "postselect"}"#,
        r#""gadget": {"mode": "postselect", "test_init": "random", "test_particles": 2}"#,
    );
    let r = run(&body);
    assert!(r.grid.iter().all(|p| p.fidelity > 0.9));
}

#[test]
fn invalid_grid_is_rejected_with_the_field_name() {
    let err = ExperimentSpec::from_json(&zeno("postselect", 0.3, "").replace("[4, 8, 16]", "[8, 4]")).unwrap_err();
    assert!(err.to_string().contains("N_grid"), "{err}");
}
