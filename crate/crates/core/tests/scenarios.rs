use ngopt_core::control::control_params_single;
use ngopt_core::optimizer::{
    maximize_probability, optimize, reduce_photons, regime_target, OptimizeOptions,
};
use ngopt_core::scenario::{cat_odd, cps, random_spec};
use ngopt_core::symplectic::GaussianPure;
use ngopt_core::{scenario::GeneratorSpec, NgError};

fn quiet() -> OptimizeOptions {
    OptimizeOptions {
        metrics: false,
        ..OptimizeOptions::default()
    }
}

#[test]
fn reduced_probabilities_match_tables() {
    let opts = OptimizeOptions::default();
    let (s, _) = reduce_photons(&cat_odd(), &[5]).unwrap();
    let p = s.probability(&opts.fock).unwrap();
    assert!((p / 3.55e-4 - 1.0).abs() < 0.05, "{p}");
    let (s, _) = reduce_photons(&cps(), &[7]).unwrap();
    let p = s.probability(&opts.fock).unwrap();
    assert!((p / 2.49e-3 - 1.0).abs() < 0.05, "{p}");
}

#[test]
fn odd_cat_report_invariants() {
    let r = optimize(&cat_odd(), &[5], &OptimizeOptions::default()).unwrap();
    assert_eq!(r.after.photons, vec![5]);
    assert!(r.probability_after >= r.probability_intermediate);
    assert!(r.gain() >= 1e3);
    assert!(r.fidelity_damping >= 1.0 - 1e-6);
    let xi = r.metrics_after.unwrap().xi_cat.value;
    assert!((xi - 0.165).abs() <= 0.03, "{xi}");
}

#[test]
fn reoptimizing_is_idempotent() {
    let r = optimize(&cat_odd(), &[5], &quiet()).unwrap();
    let again = optimize(&r.after, &[5], &quiet()).unwrap();
    assert!((again.probability_after / r.probability_after - 1.0).abs() < 0.01);
}

#[test]
fn vacuum_like_generator_keeps_identity() {
    // a product state: the control mode is vacuum and n = 0 already has p = 1
    let spec = GeneratorSpec::new(GaussianPure::vacuum(2), 1, vec![0]).unwrap();
    let res = maximize_probability(&spec, &quiet()).unwrap();
    assert!((res.probability - 1.0).abs() < 1e-12);
}

#[test]
fn random_three_plus_four() {
    let spec = random_spec(3, 4, 1.0, 0.5, 0, vec![4; 4]).unwrap();
    let target = regime_target(&spec).unwrap();
    let r = optimize(&spec, &target, &quiet()).unwrap();
    assert!(r.probability_after > r.probability_before);
    assert!(r.fidelity >= 0.85, "{}", r.fidelity);
}

#[test]
fn regime_target_skips_added_modes() {
    let spec = random_spec(1, 2, 1.0, 0.5, 2, vec![6, 6]).unwrap();
    let target = regime_target(&spec).unwrap();
    let (cm, bm) = spec.moments().block(0);
    let subtracted = matches!(control_params_single(&cm, &bm), Ok((s0, _)) if s0 > 1.0);
    assert_eq!(target[0], if subtracted { 3 } else { 6 });
}

#[test]
fn invalid_targets_are_reported() {
    match reduce_photons(&cat_odd(), &[20]) {
        Err(NgError::Invalid(_)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn lattice_metric_improves_with_photon_number() {
    use ngopt_core::fock::FockOptions;
    use ngopt_core::metrics::{xi_gkp, GKP_CONVENTION};
    use ngopt_core::scenario::gkp_breeding_generator;
    let xi: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let spec = gkp_breeding_generator(8.0, 0.3, 3, n).unwrap();
            let v = spec
                .herald(&FockOptions::default())
                .unwrap()
                .signal
                .to_vector()
                .unwrap();
            xi_gkp(&v, GKP_CONVENTION).value
        })
        .collect();
    assert!(xi[0] > xi[1] && xi[1] > xi[2], "{xi:?}");
}
