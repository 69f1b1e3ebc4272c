mod common;

use common::*;
use num_complex::Complex64;
use qsw_core::superop::{plan_communication, RowPartition};
use qsw_core::{symmetrize, DistributedLiouvillian, StateVector};
use rand::Rng;

fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect()
}

#[test]
fn assembled_rows_match_kronecker_oracle() {
    let mut r = rng(21);
    for case in 0..12 {
        let n = r.gen_range(2..6);
        let g = random_digraph(n, 0.5, &mut r);
        let omega = r.gen_range(0.0..=1.0);
        let spec = match case % 3 {
            0 => WalkDef::Local {
                h: symmetrize(&g).adjacency().clone(),
                m_l: g.adjacency().clone(),
                sources: vec![(0, 0.7)],
                sinks: vec![(n - 1, 1.3)],
            },
            1 => WalkDef::global(1.0, &g),
            _ => WalkDef::non_moralising(1.0, &g),
        };
        let want = spec.dense_liouvillian(omega);
        for workers in [1, 3] {
            let l = spec.build(omega, workers).liouvillian().to_csr();
            let got = dense(&l);
            let err = (&got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-14, "case {case}: {err}");
        }
    }
}

#[test]
fn spmv_bit_identical_across_workers() {
    let mut r = rng(22);
    let g = random_digraph(6, 0.4, &mut r);
    let spec = WalkDef::global(1.0, &g);
    let x = random_vector(36, 5);
    let base = spec.build(0.4, 1);
    let y1 = base
        .liouvillian()
        .spmv(&StateVector::from_global(&x, base.liouvillian().partition()).unwrap())
        .unwrap();
    for workers in [2, 3, 5, 8, 36, 50] {
        let w = spec.build(0.4, workers);
        let xs = StateVector::from_global(&x, w.liouvillian().partition()).unwrap();
        assert_eq!(w.liouvillian().spmv(&xs).unwrap().gather(), y1.gather());
    }
}

#[test]
fn plans_are_symmetric_and_minimal() {
    let mut r = rng(23);
    let g = random_digraph(5, 0.3, &mut r);
    let w = WalkDef::global(1.0, &g).build(0.5, 4);
    let l = w.liouvillian();
    let plans = l.comm_plan();
    for (me, plan) in plans.iter().enumerate() {
        for ex in &plan.recv {
            assert_ne!(ex.peer, me);
            let mirror = plans[ex.peer].send.iter().find(|s| s.peer == me).unwrap();
            assert_eq!(mirror.indices, ex.indices);
            assert!(ex.indices.windows(2).all(|p| p[0] < p[1]));
            assert!(ex.indices.iter().all(|&i| l.partition().owner(i) == ex.peer));
        }
        // every received index is referenced by the block
        let block = &l.blocks()[me];
        for ex in &plan.recv {
            for i in &ex.indices {
                assert!(block.matrix().col_indices().contains(i));
            }
        }
    }
    let blocks: Vec<_> = l.blocks().iter().map(|b| b.matrix().clone()).collect();
    let again = plan_communication(l.partition(), &blocks);
    assert_eq!(again.iter().collect::<Vec<_>>(), plans);
}

#[test]
fn diagonal_generator_needs_no_messages() {
    let g = qsw_core::WeightedDigraph::edgeless(4);
    let w = WalkDef::Local {
        h: g.adjacency().clone(),
        m_l: g.adjacency().clone(),
        sources: vec![],
        sinks: vec![],
    }
    .build(0.5, 4);
    assert!(w.liouvillian().comm_plan().iter().all(|p| p.is_empty()));
}

#[test]
fn cached_norms_are_exact_for_small_matrices() {
    let mut r = rng(24);
    let g = random_digraph(4, 0.5, &mut r);
    let spec = WalkDef::global(1.0, &g);
    let l = spec.build(0.6, 2);
    let a = dense(&l.liouvillian().to_csr());
    let mut p = a.clone();
    for (k, norm) in l.liouvillian().one_norms().iter().enumerate() {
        let want = (0..p.ncols())
            .map(|c| p.column(c).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        assert!((norm - want).abs() <= 1e-10 * want.max(1.0), "power {}", k + 1);
        p = &a * &p;
    }
}

#[test]
fn partition_mismatch_is_rejected() {
    let g = qsw_core::WeightedDigraph::from_arcs(2, [(0, 1, 1.0)]).unwrap();
    let w = WalkDef::global(1.0, &g).build(0.5, 2);
    let x = StateVector::zeros(&RowPartition::new(4, 3).unwrap());
    assert!(w.liouvillian().spmv(&x).is_err());
    assert!(DistributedLiouvillian::from_matrix(&qsw_core::SparseMatrix::zeros(2, 3), 1).is_err());
}
