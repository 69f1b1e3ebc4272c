//! Weighted digraphs and the classical generator matrices built from them.
//!
//! # Index convention
//!
//! Adjacency matrices are stored **column-as-source**: `G[i][j] = w` means an
//! arc of weight `w` leaving vertex `j` and entering vertex `i`. Column `j`
//! therefore lists the out-arcs of `j` and row `i` lists the in-arcs of `i`.
//! With this convention the generator `M` has zero column sums, so
//! `dp/dt = -M p` conserves probability.

mod matrix_market;

pub use matrix_market::{load_matrix_market, read_matrix_market_file, save_matrix_market};

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{QswError, Result};
use crate::sparse::SparseMatrix;

/// An auxiliary source vertex feeding `target` at `rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceArc {
    pub vertex: usize,
    pub target: usize,
    pub rate: f64,
}

/// An auxiliary sink vertex draining `origin` at `rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinkArc {
    pub vertex: usize,
    pub origin: usize,
    pub rate: f64,
}

/// Simple weighted digraph with strictly positive real weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDigraph {
    adjacency: SparseMatrix,
    n_base_vertices: usize,
    sources: Vec<SourceArc>,
    sinks: Vec<SinkArc>,
}

impl WeightedDigraph {
    /// Validates an adjacency matrix: square, real, strictly positive
    /// off-diagonal weights and an empty diagonal.
    pub fn new(adjacency: SparseMatrix) -> Result<Self> {
        validate_adjacency(&adjacency)?;
        let n = adjacency.n_rows();
        Ok(WeightedDigraph {
            adjacency,
            n_base_vertices: n,
            sources: Vec::new(),
            sinks: Vec::new(),
        })
    }

    /// Builds a digraph from `(from, to, weight)` arcs.
    pub fn from_arcs<I>(n_vertices: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let arcs: Vec<(usize, usize, f64)> = arcs.into_iter().collect();
        if let Some(&(from, to, w)) = arcs.iter().find(|a| !(a.2 > 0.0) || !a.2.is_finite()) {
            return Err(QswError::InvalidGraph(format!(
                "arc {from} -> {to} must have positive finite weight, got {w}"
            )));
        }
        let adjacency = SparseMatrix::from_unique_triplets(
            n_vertices,
            n_vertices,
            arcs.into_iter().map(|(from, to, w)| (to, from, Complex64::new(w, 0.0))),
        )
        .map_err(|e| QswError::InvalidGraph(e.to_string()))?;
        Self::new(adjacency)
    }

    pub fn edgeless(n_vertices: usize) -> Self {
        WeightedDigraph {
            adjacency: SparseMatrix::zeros(n_vertices, n_vertices),
            n_base_vertices: n_vertices,
            sources: Vec::new(),
            sinks: Vec::new(),
        }
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn into_adjacency(self) -> SparseMatrix {
        self.adjacency
    }

    /// Vertex count including any source/sink vertices.
    pub fn n_vertices(&self) -> usize {
        self.adjacency.n_rows()
    }

    pub fn n_base_vertices(&self) -> usize {
        self.n_base_vertices
    }

    pub fn source_arcs(&self) -> &[SourceArc] {
        &self.sources
    }

    pub fn sink_arcs(&self) -> &[SinkArc] {
        &self.sinks
    }

    pub fn n_arcs(&self) -> usize {
        self.adjacency.nnz()
    }

    /// Weight of the arc `from -> to`, zero when absent.
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.adjacency.get(to, from).re
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.max_abs_diff(&self.adjacency.transpose()) == 0.0
    }
}

fn validate_adjacency(adj: &SparseMatrix) -> Result<()> {
    if !adj.is_square() {
        return Err(QswError::InvalidGraph(format!(
            "adjacency must be square, got {}x{}",
            adj.n_rows(),
            adj.n_cols()
        )));
    }
    for (r, c, v) in adj.iter() {
        if v.im != 0.0 {
            return Err(QswError::InvalidGraph(format!("complex weight at ({r}, {c})")));
        }
        if !(v.re > 0.0) || !v.re.is_finite() {
            return Err(QswError::InvalidGraph(format!(
                "weight at ({r}, {c}) must be positive and finite, got {}",
                v.re
            )));
        }
        if r == c {
            return Err(QswError::InvalidGraph(format!("self-loop at vertex {r}")));
        }
    }
    Ok(())
}

/// Per-vertex weight sums.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeVector(pub Vec<f64>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for DegreeVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Undirected counterpart with `w_u(i, j) = max(w(i, j), w(j, i))`.
pub fn symmetrize(g: &WeightedDigraph) -> WeightedDigraph {
    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (r, c, v) in g.adjacency.iter() {
        for key in [(r, c), (c, r)] {
            let slot = entries.entry(key).or_insert(0.0);
            *slot = slot.max(v.re);
        }
    }
    let n = g.n_vertices();
    let adjacency = SparseMatrix::from_unique_triplets(
        n,
        n,
        entries.into_iter().map(|((r, c), w)| (r, c, Complex64::new(w, 0.0))),
    )
    .expect("symmetrized entries are unique and in range");
    WeightedDigraph {
        adjacency,
        n_base_vertices: g.n_base_vertices,
        sources: g.sources.clone(),
        sinks: g.sinks.clone(),
    }
}

/// Out-degree of each vertex: the column sums of the adjacency.
pub fn out_degrees(g: &WeightedDigraph) -> DegreeVector {
    DegreeVector(column_sums(&g.adjacency))
}

/// In-degree of each vertex: the row sums of the adjacency.
pub fn in_degrees(g: &WeightedDigraph) -> DegreeVector {
    let adj = &g.adjacency;
    DegreeVector(
        (0..adj.n_rows())
            .map(|r| adj.row(r).1.iter().map(|v| v.re).sum())
            .collect(),
    )
}

fn column_sums(adj: &SparseMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; adj.n_cols()];
    for (_, c, v) in adj.iter() {
        sums[c] += v.re;
    }
    sums
}

/// CTRW transition matrix `M = gamma * (diag(OutDeg) - G)`.
pub fn generator_matrix(gamma: f64, g: &WeightedDigraph) -> Result<SparseMatrix> {
    generator_from_adjacency(gamma, &g.adjacency)
}

pub(crate) fn generator_from_adjacency(gamma: f64, adj: &SparseMatrix) -> Result<SparseMatrix> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(QswError::param("gamma", format!("must be positive, got {gamma}")));
    }
    let outdeg = column_sums(adj);
    let n = adj.n_rows();
    let diag = outdeg
        .iter()
        .enumerate()
        .map(|(j, &d)| (j, j, Complex64::new(gamma * d, 0.0)));
    let off = adj.iter().map(|(r, c, v)| (r, c, -gamma * v));
    SparseMatrix::from_triplets(n, n, off.chain(diag))
}

/// Canonical Markov chain matrix: `C[i][j] = 1 / OutDeg(j)` on every arc.
pub fn markov_chain_matrix(g: &WeightedDigraph) -> SparseMatrix {
    let outdeg = column_sums(&g.adjacency);
    let n = g.n_vertices();
    SparseMatrix::from_unique_triplets(
        n,
        n,
        g.adjacency
            .iter()
            .map(|(r, c, _)| (r, c, Complex64::new(1.0 / outdeg[c], 0.0))),
    )
    .expect("pattern copied from a canonical matrix")
}

/// Attaches source and sink vertices.
///
/// New vertices are numbered after the existing ones: every source first (in
/// argument order), then every sink. A source adds the single arc
/// `source -> target` with weight `rate`; a sink adds `origin -> sink`.
pub fn augment(g: &WeightedDigraph, sources: &[(usize, f64)], sinks: &[(usize, f64)]) -> Result<WeightedDigraph> {
    if !g.sources.is_empty() || !g.sinks.is_empty() {
        return Err(QswError::InvalidGraph("graph is already augmented".into()));
    }
    let n = g.n_vertices();
    check_attachments("source", sources, n)?;
    check_attachments("sink", sinks, n)?;

    let total = n + sources.len() + sinks.len();
    let mut source_arcs = Vec::with_capacity(sources.len());
    let mut sink_arcs = Vec::with_capacity(sinks.len());
    let mut extra = Vec::new();
    for (k, &(target, rate)) in sources.iter().enumerate() {
        let vertex = n + k;
        source_arcs.push(SourceArc { vertex, target, rate });
        extra.push((target, vertex, Complex64::new(rate, 0.0)));
    }
    for (k, &(origin, rate)) in sinks.iter().enumerate() {
        let vertex = n + sources.len() + k;
        sink_arcs.push(SinkArc { vertex, origin, rate });
        extra.push((vertex, origin, Complex64::new(rate, 0.0)));
    }
    let adjacency = SparseMatrix::from_unique_triplets(total, total, g.adjacency.iter().chain(extra))?;
    Ok(WeightedDigraph {
        adjacency,
        n_base_vertices: n,
        sources: source_arcs,
        sinks: sink_arcs,
    })
}

fn check_attachments(kind: &str, items: &[(usize, f64)], n: usize) -> Result<()> {
    for (k, &(v, rate)) in items.iter().enumerate() {
        if v >= n {
            return Err(QswError::InvalidGraph(format!(
                "{kind} attached to vertex {v}, graph has {n} vertices"
            )));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(QswError::InvalidGraph(format!(
                "{kind} rate must be positive, got {rate}"
            )));
        }
        if items[..k].iter().any(|&(u, _)| u == v) {
            return Err(QswError::InvalidGraph(format!(
                "duplicate {kind} attached to vertex {v}"
            )));
        }
    }
    Ok(())
}
