//! Hamiltonians and Lindblad operators for the local, global and
//! non-moralising global walk variants.
//!
//! The non-moralising construction expands every vertex `v_i` into a subspace
//! whose dimension is the number of edges incident on `v_i` in the undirected
//! graph (at least one). Arcs are lifted onto every pair of expanded vertices
//! and reweighted by `(SubDeg * w)^(-1/2)`, where `SubDeg` is the number of
//! lifted arcs between the two subspaces. The Lindblad operator then tags each
//! parent of a vertex with a distinct column of the destination's Fourier
//! matrix, so that co-parents map to orthogonal states.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{QswError, Result};
use crate::graph::{generator_from_adjacency, WeightedDigraph};
use crate::sparse::SparseMatrix;

/// Which walk variant an operator set describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkKind {
    Local,
    Global,
    NonMoralisingGlobal,
}

impl WalkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WalkKind::Local => "local",
            WalkKind::Global => "global",
            WalkKind::NonMoralisingGlobal => "non-moralising-global",
        }
    }
}

/// Map from original vertices to their expanded index ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSubspaces {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    total_dim: usize,
    /// Sorted undirected neighbours of each vertex; a parent's position in
    /// this list selects its Fourier column.
    neighbours: Vec<Vec<usize>>,
}

impl VertexSubspaces {
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn n_vertices(&self) -> usize {
        self.dims.len()
    }

    pub fn range(&self, vertex: usize) -> Range<usize> {
        self.offsets[vertex]..self.offsets[vertex] + self.dims[vertex]
    }

    pub fn neighbours(&self, vertex: usize) -> &[usize] {
        &self.neighbours[vertex]
    }
}

/// Source/sink coupling: a jump `from -> to` at `rate`, applied outside the
/// decoherence parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// Everything needed to assemble a walk Liouvillian.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub kind: WalkKind,
    pub hamiltonian: SparseMatrix,
    /// For [`WalkKind::Local`] this holds the single condensed matrix `M_L`.
    pub lindblads: Vec<SparseMatrix>,
    pub rotating_hamiltonian: Option<SparseMatrix>,
    pub subspaces: Option<VertexSubspaces>,
    pub channels: Vec<Channel>,
    pub omega: f64,
}

pub(crate) const HERMITIAN_TOL: f64 = 1e-15;

pub(crate) fn check_omega(omega: f64) -> Result<()> {
    if (0.0..=1.0).contains(&omega) {
        Ok(())
    } else {
        Err(QswError::param("omega", format!("must lie in [0, 1], got {omega}")))
    }
}

fn check_square(m: &SparseMatrix, n: usize) -> Result<()> {
    if m.n_rows() != n || m.n_cols() != n {
        return Err(QswError::DimensionMismatch {
            expected: n,
            found: if m.n_rows() != n { m.n_rows() } else { m.n_cols() },
        });
    }
    Ok(())
}

fn check_hermitian(name: &'static str, m: &SparseMatrix) -> Result<()> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(QswError::param(name, format!("not Hermitian (defect {defect:e})")));
    }
    Ok(())
}

impl OperatorSet {
    pub fn local(omega: f64, hamiltonian: SparseMatrix, m_l: SparseMatrix, channels: Vec<Channel>) -> Result<Self> {
        check_omega(omega)?;
        let n = hamiltonian.n_rows();
        check_square(&hamiltonian, n)?;
        check_square(&m_l, n)?;
        check_hermitian("hamiltonian", &hamiltonian)?;
        for ch in &channels {
            if ch.from >= n || ch.to >= n {
                return Err(QswError::param("channel", format!("{ch:?} outside {n} vertices")));
            }
            if !(ch.rate > 0.0) || !ch.rate.is_finite() {
                return Err(QswError::param("channel", format!("rate must be positive in {ch:?}")));
            }
        }
        Ok(OperatorSet {
            kind: WalkKind::Local,
            hamiltonian,
            lindblads: vec![m_l],
            rotating_hamiltonian: None,
            subspaces: None,
            channels,
            omega,
        })
    }

    /// Plain global walk when both optional arguments are absent, the
    /// non-moralising variant when both are present.
    pub fn global(
        omega: f64,
        hamiltonian: SparseMatrix,
        lindblads: Vec<SparseMatrix>,
        rotating_hamiltonian: Option<SparseMatrix>,
        subspaces: Option<VertexSubspaces>,
    ) -> Result<Self> {
        check_omega(omega)?;
        let n = hamiltonian.n_rows();
        check_square(&hamiltonian, n)?;
        check_hermitian("hamiltonian", &hamiltonian)?;
        for l in &lindblads {
            check_square(l, n)?;
        }
        let kind = match (&rotating_hamiltonian, &subspaces) {
            (None, None) => WalkKind::Global,
            (Some(h_rot), Some(vsets)) => {
                check_square(h_rot, n)?;
                check_hermitian("rotating_hamiltonian", h_rot)?;
                if vsets.total_dim() != n {
                    return Err(QswError::DimensionMismatch {
                        expected: n,
                        found: vsets.total_dim(),
                    });
                }
                WalkKind::NonMoralisingGlobal
            }
            _ => {
                return Err(QswError::param(
                    "rotating_hamiltonian",
                    "rotating Hamiltonian and vertex subspaces must be given together",
                ))
            }
        };
        Ok(OperatorSet {
            kind,
            hamiltonian,
            lindblads,
            rotating_hamiltonian,
            subspaces,
            channels: Vec::new(),
            omega,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.n_rows()
    }
}

/// Condensed local Lindblad matrix, entrywise `sqrt(|M_ij|)`.
pub fn local_lindblad(m: &SparseMatrix) -> SparseMatrix {
    m.map(|v| Complex64::new(v.norm().sqrt(), 0.0))
}

/// The single global Lindblad operator: the adjacency itself.
pub fn global_lindblad(g: &WeightedDigraph) -> SparseMatrix {
    g.adjacency().clone()
}

/// Expanded vertex subspaces from the undirected graph.
pub fn nm_vsets(gu: &WeightedDigraph) -> VertexSubspaces {
    let adj = gu.adjacency();
    let neighbours: Vec<Vec<usize>> = (0..adj.n_rows()).map(|r| adj.row(r).0.to_vec()).collect();
    let dims: Vec<usize> = neighbours.iter().map(|nb| nb.len().max(1)).collect();
    let mut offsets = Vec::with_capacity(dims.len());
    let mut total_dim = 0;
    for &d in &dims {
        offsets.push(total_dim);
        total_dim += d;
    }
    VertexSubspaces {
        offsets,
        dims,
        total_dim,
        neighbours,
    }
}

fn check_vsets(g: &WeightedDigraph, vsets: &VertexSubspaces) -> Result<()> {
    if g.n_vertices() != vsets.n_vertices() {
        return Err(QswError::DimensionMismatch {
            expected: vsets.n_vertices(),
            found: g.n_vertices(),
        });
    }
    Ok(())
}

/// Lifts every arc of `g` onto the expanded space with weight
/// `(SubDeg * w)^(-1/2)`.
pub fn demoralised_weights(g: &WeightedDigraph, vsets: &VertexSubspaces) -> Result<SparseMatrix> {
    check_vsets(g, vsets)?;
    let mut triplets = Vec::new();
    for (dst, src, w) in g.adjacency().iter() {
        let sub_deg = (vsets.dims[dst] * vsets.dims[src]) as f64;
        let lifted = Complex64::new((sub_deg * w.re).powf(-0.5), 0.0);
        for a in vsets.range(dst) {
            for b in vsets.range(src) {
                triplets.push((a, b, lifted));
            }
        }
    }
    let n = vsets.total_dim;
    SparseMatrix::from_unique_triplets(n, n, triplets)
}

/// Hamiltonian of the demoralised undirected graph.
pub fn nm_h(gamma: f64, gu: &WeightedDigraph, vsets: &VertexSubspaces) -> Result<SparseMatrix> {
    let lifted = demoralised_weights(gu, vsets)?;
    generator_from_adjacency(gamma, &lifted)
}

/// Entry `(row, col)` of the unnormalised `n x n` Fourier matrix,
/// `exp(2 pi i row col / n)`, exact at quarter turns.
pub fn fourier_entry(n: usize, row: usize, col: usize) -> Complex64 {
    let k = (row * col) % n;
    if (4 * k).is_multiple_of(n) {
        match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
    }
}

/// Row-major unnormalised Fourier matrix.
pub fn fourier_matrix(n: usize) -> Vec<Complex64> {
    (0..n * n).map(|k| fourier_entry(n, k / n, k % n)).collect()
}

/// Demoralised Lindblad operator.
///
/// An arc `src -> dst` with lifted weight `w_D` contributes
/// `gamma * F[l][p] * w_D` at `(dst_l, src_j)` for every expanded `l`, `j`,
/// where `F` is the Fourier matrix of the destination subspace and `p` is
/// the position of `src` among the undirected neighbours of `dst`.
pub fn nm_l(gamma: f64, g: &WeightedDigraph, vsets: &VertexSubspaces) -> Result<SparseMatrix> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(QswError::param("gamma", format!("must be positive, got {gamma}")));
    }
    check_vsets(g, vsets)?;
    let mut triplets = Vec::new();
    for (dst, src, w) in g.adjacency().iter() {
        let d = vsets.dims[dst];
        let p = vsets.neighbours[dst].binary_search(&src).map_err(|_| {
            QswError::InvalidGraph(format!(
                "arc {src} -> {dst} is absent from the undirected graph used for the subspaces"
            ))
        })?;
        let sub_deg = (d * vsets.dims[src]) as f64;
        let lifted = gamma * (sub_deg * w.re).powf(-0.5);
        for (l, a) in vsets.range(dst).enumerate() {
            let amp = fourier_entry(d, l, p) * lifted;
            for b in vsets.range(src) {
                triplets.push((a, b, amp));
            }
        }
    }
    let n = vsets.total_dim;
    SparseMatrix::from_unique_triplets(n, n, triplets)
}

/// Rotating Hamiltonian: inside each subspace of dimension `d`, `+i` where
/// `row = col + 1 (mod d)` and `-i` where `row = col - 1 (mod d)`.
///
/// For `d = 2` both cases name the same entry and their contributions
/// cancel, so two-dimensional blocks are zero.
pub fn nm_h_rot(vsets: &VertexSubspaces) -> SparseMatrix {
    let mut triplets = Vec::new();
    for v in 0..vsets.n_vertices() {
        let d = vsets.dims[v];
        if d < 2 {
            continue;
        }
        let base = vsets.offsets[v];
        for col in 0..d {
            triplets.push((base + (col + 1) % d, base + col, Complex64::new(0.0, 1.0)));
            triplets.push((base + (col + d - 1) % d, base + col, Complex64::new(0.0, -1.0)));
        }
    }
    let n = vsets.total_dim;
    SparseMatrix::from_triplets(n, n, triplets).expect("indices lie inside the expanded space")
}

pub(crate) const NORMALISATION_TOL: f64 = 1e-12;

/// Spreads each vertex probability uniformly over its subspace.
pub fn nm_rho_map(p: &[f64], vsets: &VertexSubspaces) -> Result<Vec<f64>> {
    if p.len() != vsets.n_vertices() {
        return Err(QswError::DimensionMismatch {
            expected: vsets.n_vertices(),
            found: p.len(),
        });
    }
    check_probabilities(p)?;
    let mut out = vec![0.0; vsets.total_dim];
    for (v, &pv) in p.iter().enumerate() {
        let share = pv / vsets.dims[v] as f64;
        for k in vsets.range(v) {
            out[k] = share;
        }
    }
    Ok(out)
}

pub(crate) fn check_probabilities(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(QswError::InvalidState(format!(
            "negative or non-finite probability {bad}"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALISATION_TOL {
        return Err(QswError::InvalidState(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Folds expanded populations back onto the original vertices.
pub fn nm_measure(rho_diag: &[f64], vsets: &VertexSubspaces) -> Vec<f64> {
    (0..vsets.n_vertices())
        .map(|v| vsets.range(v).map(|k| rho_diag[k]).sum())
        .collect()
}
