mod common;

use common::*;
use proptest::prelude::*;
use qsw_core::{generator_matrix, local_lindblad, symmetrize, InitialState, WeightedDigraph};

fn digraph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::option::weighted(0.4, 0.05f64..1.0), n * n).prop_map(move |cells| {
            let arcs = cells
                .iter()
                .enumerate()
                .filter_map(|(k, w)| w.map(|w| (k / n, k % n, w)))
                .filter(|(a, b, _)| a != b);
            WeightedDigraph::from_arcs(n, arcs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_and_hermiticity_preserved(g in digraph(6), omega in 0.0f64..=1.0, t in 0.0f64..30.0, kind in 0usize..3) {
        let spec = match kind {
            0 => WalkDef::local_adjacency(&g, &symmetrize(&g)),
            1 => WalkDef::global(1.0, &g),
            _ => WalkDef::non_moralising(1.0, &g),
        };
        let mut w = spec.build(omega, 3);
        let n = w.augmented_count();
        let mut r = rng(n as u64);
        w.initial_state(InitialState::Density(random_density(n, &mut r))).unwrap();
        w.step(t).unwrap();
        let rho = w.gather_result().unwrap();
        let (tr, herm) = trace_and_hermiticity(&rho);
        prop_assert!(tr <= 1e-12);
        prop_assert!(herm <= 1e-11);
    }

    #[test]
    fn generator_columns_vanish(g in digraph(8), gamma in 0.1f64..5.0) {
        let m = generator_matrix(gamma, &g).unwrap();
        let mut sums = vec![0.0; g.n_vertices()];
        let mut maxdeg: f64 = 0.0;
        for (i, j, v) in m.iter() {
            sums[j] += v.re;
            if i == j { maxdeg = maxdeg.max(v.re); }
        }
        for s in sums {
            prop_assert!(s.abs() <= 1e-15 * maxdeg.max(1.0) * 4.0);
        }
    }

    #[test]
    fn classical_limit_conserves_probability(g in digraph(6), t in 0.0f64..20.0) {
        let m = generator_matrix(1.0, &g).unwrap();
        let spec = WalkDef::Local {
            h: generator_matrix(1.0, &symmetrize(&g)).unwrap(),
            m_l: local_lindblad(&m),
            sources: vec![],
            sinks: vec![],
        };
        let mut w = spec.build(1.0, 2);
        let n = g.n_vertices();
        w.initial_state(InitialState::Populations(pure_state(n, 0))).unwrap();
        w.step(t).unwrap();
        let p = w.gather_populations().unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn symmetrize_permutation_equivariant(g in digraph(6), shift in 0usize..6) {
        let n = g.n_vertices();
        let perm = |v: usize| (v + shift) % n;
        let relabel = |h: &WeightedDigraph| {
            WeightedDigraph::from_arcs(n, h.adjacency().iter().map(|(to, from, w)| (perm(from), perm(to), w.re))).unwrap()
        };
        prop_assert_eq!(symmetrize(&relabel(&g)), relabel(&symmetrize(&g)));
    }
}
