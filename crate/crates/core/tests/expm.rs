mod common;

use common::*;
use num_complex::Complex64;
use qsw_core::expm::{build_theta_table, compute_theta_table, DOUBLE_TOLERANCE};
use qsw_core::{
    select_parameters, series, step, DistributedLiouvillian, ExpmConfig, QswError, SparseMatrix, StateVector,
    TaylorParameters, WeightedDigraph,
};
use rand::Rng;

#[test]
fn runtime_theta_matches_shipped_table() {
    let shipped = build_theta_table(DOUBLE_TOLERANCE).unwrap();
    let computed = compute_theta_table(DOUBLE_TOLERANCE);
    for (m, (a, b)) in computed.iter().zip(shipped.iter()).enumerate() {
        let rel = (a - b).abs() / b;
        assert!(rel <= 1e-10, "m = {}: {a} vs {b}", m + 1);
    }
}

#[test]
fn looser_tolerance_gives_larger_thetas() {
    let tight = build_theta_table(DOUBLE_TOLERANCE).unwrap();
    let loose = build_theta_table(2f64.powi(-24)).unwrap();
    assert!(loose.iter().zip(tight.iter()).all(|(l, t)| l > t));
    assert!(loose.windows(2).all(|w| w[0] < w[1]));
    // memoised
    assert!(std::sync::Arc::ptr_eq(
        &loose,
        &build_theta_table(2f64.powi(-24)).unwrap()
    ));
}

fn random_generator(n: usize, seed: u64) -> SparseMatrix {
    let mut r = rng(seed);
    let g = random_digraph(n, 0.5, &mut r);
    let spec = WalkDef::global(1.0, &g);
    spec.build(r.gen_range(0.0..1.0), 1).liouvillian().to_csr()
}

/// Smallest `m * s` over every `m` and the smallest admissible `s`.
fn exhaustive_cost(norm: f64, theta: &[f64]) -> usize {
    theta
        .iter()
        .enumerate()
        .map(|(i, th)| (i + 1) * ((norm / th).ceil() as usize).max(1))
        .min()
        .unwrap()
}

#[test]
fn parameter_cost_grows_with_time() {
    let a = random_generator(5, 1);
    let l = DistributedLiouvillian::from_matrix(&a, 1).unwrap();
    let cfg = ExpmConfig::default();
    let mut last = 0;
    let mut t = 1e-6;
    while t < 1e4 {
        let p = select_parameters(l.one_norms(), t, cfg.theta());
        assert!(p.cost() >= last, "t = {t}");
        // the norm branch agrees with an exhaustive search
        let norm = t * l.one_norms()[0];
        if norm < 60.0 {
            assert_eq!(p.cost(), exhaustive_cost(norm, cfg.theta()));
        } else {
            assert!(p.cost() <= exhaustive_cost(norm, cfg.theta()));
        }
        last = p.cost();
        t *= 3.0;
    }
}

#[test]
fn tiny_norm_is_one_step() {
    let cfg = ExpmConfig::default();
    let p = select_parameters(&[1.0; 9], 1e-17, cfg.theta());
    assert_eq!(p, TaylorParameters { m_star: 1, s: 1 });
}

#[test]
fn semigroup_property() {
    let mut r = rng(5);
    let cfg = ExpmConfig::default();
    for seed in 0..5 {
        let a = random_generator(4, 100 + seed);
        let l = DistributedLiouvillian::from_matrix(&a, 2).unwrap();
        let rho = random_density(4, &mut r);
        let v = StateVector::from_global(&rho.vectorize(), l.partition()).unwrap();
        let (t1, t2) = (r.gen_range(0.1..5.0), r.gen_range(0.1..5.0));
        let direct = step(&l, &v, t1 + t2, &cfg).unwrap();
        let split = step(&l, &step(&l, &v, t1, &cfg).unwrap(), t2, &cfg).unwrap();
        assert!(max_diff(&direct.gather(), &split.gather()) < 1e-11);
    }
}

#[test]
fn directed_dimer_against_dense() {
    let g = WeightedDigraph::from_arcs(2, [(0, 1, 1.0)]).unwrap();
    let spec = WalkDef::global(1.0, &g);
    let cfg = ExpmConfig::default();
    for omega in [0.0, 0.5, 1.0] {
        let w = spec.build(omega, 1);
        let dense_l = spec.dense_liouvillian(omega);
        let v0 = qsw_core::DensityMatrix::from_populations(&[1.0, 0.0])
            .unwrap()
            .vectorize();
        let v = StateVector::from_global(&v0, w.liouvillian().partition()).unwrap();
        for t in [1.0, 10.0, 100.0] {
            let got = step(w.liouvillian(), &v, t, &cfg).unwrap().gather();
            assert!(max_diff(&got, &dense_evolve(&dense_l, &v0, t)) <= 1e-10);
        }
    }
}

#[test]
fn series_endpoints_and_zero_generator() {
    let cfg = ExpmConfig::default();
    let a = random_generator(3, 9);
    let l = DistributedLiouvillian::from_matrix(&a, 3).unwrap();
    let mut r = rng(1);
    let rho = random_density(3, &mut r);
    let v = StateVector::from_global(&rho.vectorize(), l.partition()).unwrap();
    let s = series(&l, &v, 0.5, 4.0, 1, &cfg).unwrap();
    assert_eq!(s.states.len(), 2);
    assert!(max_diff(&s.states[0].gather(), &step(&l, &v, 0.5, &cfg).unwrap().gather()) <= 1e-12);
    assert!(max_diff(&s.states[1].gather(), &step(&l, &v, 4.0, &cfg).unwrap().gather()) <= 1e-12);

    let zero = DistributedLiouvillian::from_matrix(&SparseMatrix::zeros(9, 9), 2).unwrap();
    let v = StateVector::from_global(&rho.vectorize(), zero.partition()).unwrap();
    let s = series(&zero, &v, 0.0, 10.0, 7, &cfg).unwrap();
    assert!(s.states.iter().all(|x| *x == v));
    assert_eq!(s.times.len(), 8);
}

#[test]
fn series_with_few_points_over_long_span() {
    // fewer output intervals than scaling steps
    let cfg = ExpmConfig::default();
    let a = random_generator(4, 3);
    let l = DistributedLiouvillian::from_matrix(&a, 1).unwrap();
    let mut r = rng(2);
    let rho = random_density(4, &mut r);
    let v = StateVector::from_global(&rho.vectorize(), l.partition()).unwrap();
    let s = series(&l, &v, 0.0, 200.0, 3, &cfg).unwrap();
    assert!(s.parameters.s > 3);
    for (t, x) in s.times.iter().zip(&s.states) {
        assert!(max_diff(&x.gather(), &step(&l, &v, *t, &cfg).unwrap().gather()) <= 1e-12);
    }
}

#[test]
fn overflow_is_reported() {
    let big = SparseMatrix::identity(4).scale(Complex64::new(1e300, 0.0));
    let l = DistributedLiouvillian::from_matrix(&big, 1).unwrap();
    let v = StateVector::from_global(&[Complex64::new(1.0, 0.0); 4], l.partition()).unwrap();
    assert!(step(&l, &v, 10.0, &ExpmConfig::default()).is_err());
}

#[test]
fn unbounded_spans_are_refused() {
    let gen = SparseMatrix::from_real_dense(2, 2, &[-1.0, 1.0, 1.0, -1.0]).unwrap();
    let l = DistributedLiouvillian::from_matrix(&gen, 1).unwrap();
    let v = StateVector::from_global(&[Complex64::new(1.0, 0.0); 2], l.partition()).unwrap();
    assert!(matches!(
        step(&l, &v, 1e300, &ExpmConfig::default()),
        Err(QswError::InvalidParameter { name: "t", .. })
    ));
    let inf = gen.scale(Complex64::new(f64::INFINITY, 0.0));
    let l = DistributedLiouvillian::from_matrix(&inf, 1).unwrap();
    assert!(matches!(
        step(&l, &v, 1.0, &ExpmConfig::default()),
        Err(QswError::NonFinite(_))
    ));
}
