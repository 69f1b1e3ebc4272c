//! Fixtures and dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsw_core::{
    generator_matrix, nm_h, nm_h_rot, nm_l, nm_vsets, symmetrize, DensityMatrix, InitialState, SparseMatrix,
    StateVector, VertexSubspaces, WalkSystem, WeightedDigraph,
};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// v1 -> v3 and v2 -> v3.
pub fn three_vertex() -> (WeightedDigraph, WeightedDigraph) {
    let g = WeightedDigraph::from_arcs(3, [(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
    let gu = symmetrize(&g);
    (g, gu)
}

/// `0 -> 1 -> ... -> n-1` with weights drawn from `(0.05, 1)`.
pub fn line_digraph(n: usize, rng: &mut impl Rng) -> WeightedDigraph {
    WeightedDigraph::from_arcs(n, (0..n - 1).map(|i| (i, i + 1, rng.gen_range(0.05..1.0)))).unwrap()
}

pub fn complete_digraph(n: usize, rng: &mut impl Rng) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                arcs.push((i, j, rng.gen_range(0.05..1.0)));
            }
        }
    }
    WeightedDigraph::from_arcs(n, arcs).unwrap()
}

/// Undirected cycle with unit weights.
pub fn cycle_graph(n: usize) -> WeightedDigraph {
    let arcs = (0..n).flat_map(|i| {
        let j = (i + 1) % n;
        [(i, j, 1.0), (j, i, 1.0)]
    });
    WeightedDigraph::from_arcs(n, arcs).unwrap()
}

pub fn random_digraph(n: usize, p: f64, rng: &mut impl Rng) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                arcs.push((i, j, rng.gen_range(0.05..1.0)));
            }
        }
    }
    WeightedDigraph::from_arcs(n, arcs).unwrap()
}

/// Points uniform in the unit ball, coupled by `-d^-3`.
pub fn dipole_network(n: usize, min_separation: f64, rng: &mut impl Rng) -> SparseMatrix {
    let mut points: Vec<[f64; 3]> = Vec::new();
    while points.len() < n {
        let p = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if p.iter().map(|x| x * x).sum::<f64>() > 1.0 {
            continue;
        }
        if points.iter().any(|q| distance(&p, q) < min_separation) {
            continue;
        }
        points.push(p);
    }
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                t.push((i, j, c(-distance(&points[i], &points[j]).powi(-3))));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, t).unwrap()
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn dense(m: &SparseMatrix) -> CMat {
    let mut out = CMat::zeros(m.n_rows(), m.n_cols());
    for (r, col, v) in m.iter() {
        out[(r, col)] = v;
    }
    out
}

fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut e = CMat::zeros(n, n);
    e[(i, j)] = c(1.0);
    e
}

/// A walk described by explicit operators, so it can be built both by the
/// library and by the Kronecker-product oracle.
#[derive(Clone, Debug)]
pub enum WalkDef {
    Local {
        h: SparseMatrix,
        m_l: SparseMatrix,
        sources: Vec<(usize, f64)>,
        sinks: Vec<(usize, f64)>,
    },
    Global {
        h: SparseMatrix,
        lindblads: Vec<SparseMatrix>,
    },
    NonMoralising {
        h: SparseMatrix,
        l: SparseMatrix,
        h_rot: SparseMatrix,
        vsets: VertexSubspaces,
    },
}

impl WalkDef {
    /// Adjacency-based local walk: `H = G^u`, `M_L = G`.
    pub fn local_adjacency(g: &WeightedDigraph, gu: &WeightedDigraph) -> WalkDef {
        WalkDef::Local {
            h: gu.adjacency().clone(),
            m_l: g.adjacency().clone(),
            sources: vec![],
            sinks: vec![],
        }
    }

    pub fn global(gamma: f64, g: &WeightedDigraph) -> WalkDef {
        WalkDef::Global {
            h: generator_matrix(gamma, &symmetrize(g)).unwrap(),
            lindblads: vec![g.adjacency().clone()],
        }
    }

    pub fn non_moralising(gamma: f64, g: &WeightedDigraph) -> WalkDef {
        let gu = symmetrize(g);
        let vsets = nm_vsets(&gu);
        WalkDef::NonMoralising {
            h: nm_h(gamma, &gu, &vsets).unwrap(),
            l: nm_l(gamma, g, &vsets).unwrap(),
            h_rot: nm_h_rot(&vsets),
            vsets,
        }
    }

    pub fn build(&self, omega: f64, workers: usize) -> WalkSystem {
        match self {
            WalkDef::Local { h, m_l, sources, sinks } => {
                WalkSystem::new_lqsw(omega, h, m_l, sources, sinks, workers).unwrap()
            }
            WalkDef::Global { h, lindblads } => WalkSystem::new_gqsw(omega, h, lindblads, None, None, workers).unwrap(),
            WalkDef::NonMoralising { h, l, h_rot, vsets } => {
                WalkSystem::new_gqsw(omega, h, std::slice::from_ref(l), Some(h_rot), Some(vsets), workers).unwrap()
            }
        }
    }

    /// Density matrix dimension.
    pub fn dim(&self) -> usize {
        match self {
            WalkDef::Local { h, sources, sinks, .. } => h.n_rows() + sources.len() + sinks.len(),
            WalkDef::Global { h, .. } | WalkDef::NonMoralising { h, .. } => h.n_rows(),
        }
    }

    /// Dense superoperator from explicit Kronecker products.
    pub fn dense_liouvillian(&self, omega: f64) -> CMat {
        let n = self.dim();
        match self {
            WalkDef::Local { h, m_l, sources, sinks } => {
                let base = h.n_rows();
                let pad = |m: &SparseMatrix| {
                    let mut out = CMat::zeros(n, n);
                    out.view_mut((0, 0), (base, base)).copy_from(&dense(m));
                    out
                };
                let inside: Vec<CMat> = m_l.iter().map(|(i, j, v)| unit(n, i, j) * v).collect();
                let mut outside = Vec::new();
                for (k, &(target, rate)) in sources.iter().enumerate() {
                    outside.push(unit(n, target, base + k) * c(rate.sqrt()));
                }
                for (k, &(origin, rate)) in sinks.iter().enumerate() {
                    outside.push(unit(n, base + sources.len() + k, origin) * c(rate.sqrt()));
                }
                gksl(omega, &pad(h), &inside, &outside, None)
            }
            WalkDef::Global { h, lindblads } => {
                let ls: Vec<CMat> = lindblads.iter().map(dense).collect();
                gksl(omega, &dense(h), &ls, &[], None)
            }
            WalkDef::NonMoralising { h, l, h_rot, .. } => gksl(omega, &dense(h), &[dense(l)], &[], Some(&dense(h_rot))),
        }
    }
}

fn commutator_super(x: &CMat) -> CMat {
    let id = CMat::identity(x.nrows(), x.nrows());
    id.kronecker(x) - x.transpose().kronecker(&id)
}

fn dissipator_super(l: &CMat) -> CMat {
    let n = l.nrows();
    let id = CMat::identity(n, n);
    let k = l.adjoint() * l;
    l.conjugate().kronecker(l) - (id.kronecker(&k) + k.transpose().kronecker(&id)) * c(0.5)
}

/// `-i(1-w)[H] + w(i[H_rot] + sum D[L_in]) + sum D[L_out]`.
pub fn gksl(omega: f64, h: &CMat, inside: &[CMat], outside: &[CMat], h_rot: Option<&CMat>) -> CMat {
    let i = Complex64::new(0.0, 1.0);
    let mut out = commutator_super(h) * (-i * (1.0 - omega));
    if let Some(r) = h_rot {
        out += commutator_super(r) * (i * omega);
    }
    for l in inside {
        out += dissipator_super(l) * c(omega);
    }
    for l in outside {
        out += dissipator_super(l);
    }
    out
}

/// `exp(t A) v` by dense exponentiation.
pub fn dense_evolve(a: &CMat, v: &[Complex64], t: f64) -> Vec<Complex64> {
    let e = (a * c(t)).exp();
    let x = nalgebra::DVector::from_column_slice(v);
    (e * x).iter().copied().collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_diff_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn pure_state(n: usize, k: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[k] = 1.0;
    p
}

/// Random diagonal-dominant density matrix with coherences.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    // rho = A A^dag / Tr
    let a = CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    let rho = rho / tr;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(if i == j {
                c(rho[(i, j)].re)
            } else {
                (rho[(i, j)] + rho[(j, i)].conj()) * c(0.5)
            });
        }
    }
    let tr: f64 = (0..n).map(|i| entries[i * n + i].re).sum();
    entries.iter_mut().for_each(|x| *x /= tr);
    DensityMatrix::new(n, entries).unwrap()
}

pub fn set_state(w: &mut WalkSystem, spec: InitialState) {
    w.initial_state(spec).unwrap();
}

pub fn vector(w: &WalkSystem) -> Vec<Complex64> {
    w.state().map(StateVector::gather).unwrap()
}

/// `|Tr rho - 1|` and `max |rho - rho^dag|`.
pub fn trace_and_hermiticity(rho: &DensityMatrix) -> (f64, f64) {
    ((rho.trace() - c(1.0)).norm(), rho.hermitian_defect())
}
