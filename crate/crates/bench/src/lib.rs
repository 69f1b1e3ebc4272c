//! Workloads shared by the benchmarks.

use qsw_core::{generator_matrix, local_lindblad, symmetrize, InitialState, WalkSystem, WeightedDigraph};

/// Directed ring `0 -> 1 -> ... -> n-1 -> 0` with a chord every third vertex.
pub fn ring_with_chords(n: usize) -> WeightedDigraph {
    let arcs = (0..n)
        .map(|i| (i, (i + 1) % n, 1.0))
        .chain((0..n).step_by(3).map(|i| (i, (i + n / 2) % n, 0.5)));
    WeightedDigraph::from_arcs(n, arcs).expect("valid ring")
}

/// Local walk on [`ring_with_chords`] with a sink on the last vertex,
/// started from vertex 0.
pub fn local_walk(n: usize, omega: f64, workers: usize) -> WalkSystem {
    let g = ring_with_chords(n);
    let h = generator_matrix(1.0, &symmetrize(&g)).expect("generator");
    let m_l = local_lindblad(&generator_matrix(1.0, &g).expect("generator"));
    let mut w = WalkSystem::new_lqsw(omega, &h, &m_l, &[], &[(n - 1, 0.5)], workers).expect("walk");
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    w.initial_state(InitialState::Populations(p)).expect("state");
    w
}
