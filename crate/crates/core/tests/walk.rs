mod common;

use common::*;
use num_complex::Complex64;
use qsw_core::{expected_survival_time, step, DensityMatrix, ExpmConfig, InitialState, QswError, WalkKind, WalkSystem};

#[test]
fn rabi_dimer_populations() {
    let h = qsw_core::SparseMatrix::from_real_dense(2, 2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
    let zero = qsw_core::SparseMatrix::zeros(2, 2);
    let mut w = WalkSystem::new_lqsw(0.0, &h, &zero, &[], &[], 2).unwrap();
    for t in [0.5, 2.0, 13.0] {
        w.initial_state(InitialState::Populations(vec![1.0, 0.0])).unwrap();
        w.step(t).unwrap();
        assert!((w.gather_populations().unwrap()[0] - t.cos().powi(2)).abs() < 1e-13);
    }
}

#[test]
fn nm_initial_state_is_spread_over_subspaces() {
    let (g, _) = three_vertex();
    let mut w = WalkDef::non_moralising(1.0, &g).build(0.5, 1);
    assert_eq!(w.kind(), WalkKind::NonMoralisingGlobal);
    assert_eq!(w.augmented_count(), 4);
    assert_eq!(w.measured_count(), 3);
    w.initial_state(InitialState::Populations(vec![1.0, 0.0, 0.0])).unwrap();
    assert_eq!(w.gather_result().unwrap().populations(), vec![1.0, 0.0, 0.0, 0.0]);
    w.initial_state(InitialState::Populations(vec![0.0, 0.0, 1.0])).unwrap();
    assert_eq!(w.gather_result().unwrap().populations(), vec![0.0, 0.0, 0.5, 0.5]);
    w.step(3.0).unwrap();
    let p = w.gather_populations().unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn maximally_mixed_initial_state() {
    let mut r = rng(31);
    let g = random_digraph(5, 0.4, &mut r);
    let mut w = WalkDef::global(1.0, &g).build(0.5, 3);
    w.initial_state(InitialState::Populations(vec![0.2; 5])).unwrap();
    let rho = w.gather_result().unwrap();
    assert_eq!(rho, DensityMatrix::maximally_mixed(5));
}

#[test]
fn density_round_trip_with_coherence() {
    let (g, _) = three_vertex();
    let mut w = WalkDef::global(1.0, &g).build(0.5, 2);
    let mut r = rng(32);
    let rho = random_density(3, &mut r);
    w.initial_state(InitialState::Density(rho.clone())).unwrap();
    let back = w.gather_result().unwrap();
    assert_eq!(back, rho);
    assert_eq!(w.gather_populations().unwrap(), rho.populations());
}

#[test]
fn step_delegates_to_expm() {
    let mut r = rng(33);
    let g = random_digraph(4, 0.5, &mut r);
    let mut w = WalkDef::global(1.0, &g).build(0.7, 2);
    let rho = random_density(4, &mut r);
    w.initial_state(InitialState::Density(rho)).unwrap();
    let before = w.state().unwrap().clone();
    w.step(2.5).unwrap();
    let direct = step(w.liouvillian(), &before, 2.5, &ExpmConfig::default()).unwrap();
    assert_eq!(w.state().unwrap(), &direct);
}

#[test]
fn series_leaves_final_state_and_matches_steps() {
    let mut r = rng(34);
    let g = random_digraph(4, 0.5, &mut r);
    let spec = WalkDef::global(1.0, &g);
    let mut w = spec.build(0.2, 2);
    let rho = random_density(4, &mut r);
    w.initial_state(InitialState::Density(rho.clone())).unwrap();
    let s = w.series(0.0, 6.0, 12).unwrap();
    assert_eq!(w.state().unwrap(), s.states.last().unwrap());
    let mut check = spec.build(0.2, 2);
    check.initial_state(InitialState::Density(rho)).unwrap();
    check.step(6.0).unwrap();
    assert!(max_diff(&vector(&check), &vector(&w)) <= 1e-12);
}

#[test]
fn set_omega_matches_fresh_builds() {
    let mut r = rng(35);
    let g = random_digraph(3, 0.6, &mut r);
    let spec = WalkDef::global(1.0, &g);
    let mut w = spec.build(0.5, 2);
    for omega in [0.0, 0.5, 1.0, 1.0] {
        w.set_omega(omega).unwrap();
        let fresh = spec.build(omega, 2);
        let diff = w.liouvillian().to_csr().max_abs_diff(&fresh.liouvillian().to_csr());
        assert!(diff <= 1e-14);
    }
    assert!(w.set_omega(1.5).is_err());
    assert_eq!(w.omega(), 1.0);
}

#[test]
fn set_omega_keeps_state() {
    let (g, gu) = three_vertex();
    let mut w = WalkDef::local_adjacency(&g, &gu).build(1.0, 1);
    w.initial_state(InitialState::Populations(vec![0.0, 1.0, 0.0])).unwrap();
    let before = w.state().unwrap().clone();
    w.set_omega(0.3).unwrap();
    assert_eq!(w.state().unwrap(), &before);
}

#[test]
fn invalid_initial_states() {
    let (g, _) = three_vertex();
    let mut w = WalkDef::global(1.0, &g).build(0.5, 1);
    assert!(matches!(
        w.initial_state(InitialState::Populations(vec![0.5, 0.2, 0.2])),
        Err(QswError::InvalidState(_))
    ));
    assert!(w.initial_state(InitialState::Populations(vec![0.5, 0.5])).is_err());
    let c = |x: f64, y: f64| Complex64::new(x, y);
    let not_hermitian = vec![c(0.5, 0.), c(0.1, 0.1), c(0.1, 0.1), c(0.5, 0.)];
    assert!(DensityMatrix::new(2, not_hermitian).is_err());
    assert!(WalkSystem::new_lqsw(0.5, g.adjacency(), g.adjacency(), &[(5, 1.0)], &[], 1).is_err());
}

#[test]
fn positivity_of_evolved_states() {
    let mut r = rng(36);
    for case in 0..6 {
        let g = random_digraph(4, 0.5, &mut r);
        let spec = if case % 2 == 0 {
            WalkDef::global(1.0, &g)
        } else {
            WalkDef::non_moralising(1.0, &g)
        };
        let mut w = spec.build(0.6, 2);
        let n = w.augmented_count();
        w.initial_state(InitialState::Density(random_density(n, &mut r)))
            .unwrap();
        w.step(3.0).unwrap();
        let rho = w.gather_result().unwrap();
        // full validation includes a positivity check at this size
        DensityMatrix::new(n, rho.entries().to_vec()).unwrap();
    }
}

#[test]
fn nm_sink_transfer_exceeds_local() {
    let (g, gu) = three_vertex();
    let mut nm = WalkDef::non_moralising(1.0, &g).build(0.9, 2);
    let mut local = WalkDef::local_adjacency(&g, &gu).build(0.9, 2);
    nm.initial_state(InitialState::Populations(vec![1.0, 0.0, 0.0]))
        .unwrap();
    local
        .initial_state(InitialState::Populations(vec![1.0, 0.0, 0.0]))
        .unwrap();
    let a = nm.series(0.0, 25.0, 500).unwrap();
    let b = local.series(0.0, 25.0, 500).unwrap();
    let sink = |w: &WalkSystem, v: &qsw_core::StateVector| w.populations_of(v)[2];
    let late = a.states.len() - 1;
    assert!(sink(&nm, &a.states[late]) > sink(&local, &b.states[late]));
}

#[test]
fn survival_time_of_exponential_fill() {
    let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.1).collect();
    let p: Vec<f64> = times.iter().map(|t| 1.0 - (-t).exp()).collect();
    assert!((expected_survival_time(&times, &p).unwrap() - 1.0).abs() < 1e-6);
}
