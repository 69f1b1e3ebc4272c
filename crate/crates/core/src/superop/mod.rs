//! Distributed vectorized Liouvillian.
//!
//! The superoperator is split row-wise over `n_workers` contiguous ranges.
//! Each worker assembles its own rows, and a communication plan fixed at
//! build time lists exactly which off-range vector elements it must receive
//! from each peer before a multiplication. A product is a bulk-synchronous
//! round: every worker packs the elements its peers asked for, then every
//! worker multiplies its block against its own segment plus the received
//! halo. Worker-local arithmetic order never depends on message timing, so
//! results are bit-identical run to run.

mod assemble;
mod norms;
mod partition;

pub use norms::{one_norm_series, NORM_SERIES_LEN};
pub use partition::{RowPartition, StateVector};

use std::collections::BTreeMap;
use std::ops::Range;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{QswError, Result};
use crate::operators::{check_omega, Channel, OperatorSet, WalkKind};
use crate::sparse::SparseMatrix;

use assemble::{canonical_row, GlobalRows, LocalRows, MatrixRows, RowSource};

const PARALLEL_MIN_NNZ: usize = 20_000;

/// Element indices exchanged with one peer, as sorted global indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exchange {
    pub peer: usize,
    pub indices: Vec<usize>,
}

/// What one worker receives before each product and what it sends.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkerPlan {
    pub recv: Vec<Exchange>,
    pub send: Vec<Exchange>,
}

impl WorkerPlan {
    pub fn is_empty(&self) -> bool {
        self.recv.is_empty() && self.send.is_empty()
    }

    pub fn recv_len(&self) -> usize {
        self.recv.iter().map(|e| e.indices.len()).sum()
    }
}

/// One worker's rows of the superoperator.
#[derive(Clone, Debug)]
pub struct LocalBlock {
    rows: Range<usize>,
    /// Local rows against global columns.
    matrix: SparseMatrix,
    /// Column indices remapped into `[own segment | received halo]`.
    ext_cols: Vec<usize>,
    plan: WorkerPlan,
    /// For each receive exchange: index of the matching send in the peer's plan.
    recv_slots: Vec<usize>,
}

impl LocalBlock {
    pub fn rows(&self) -> Range<usize> {
        self.rows.clone()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn plan(&self) -> &WorkerPlan {
        &self.plan
    }
}

/// Row-partitioned Liouvillian with its communication plan and cached
/// 1-norm power series.
#[derive(Clone, Debug)]
pub struct DistributedLiouvillian {
    system_dim: usize,
    partition: RowPartition,
    blocks: Vec<LocalBlock>,
    one_norms: Vec<f64>,
    omega: Option<f64>,
}

fn check_operator(name: &'static str, m: &SparseMatrix, n: usize) -> Result<()> {
    if m.n_rows() != n || m.n_cols() != n {
        return Err(QswError::InvalidParameter {
            name,
            reason: format!("expected {n}x{n}, got {}x{}", m.n_rows(), m.n_cols()),
        });
    }
    Ok(())
}

impl DistributedLiouvillian {
    /// Local-interaction Liouvillian
    /// `-i(1-w)(I(x)H - H^T(x)I) + w * sum_k D_k + sum D_channels`, assembled
    /// directly from the entries of `h` and `m_l`.
    pub fn build_local(
        omega: f64,
        h: &SparseMatrix,
        m_l: &SparseMatrix,
        channels: &[Channel],
        n_workers: usize,
    ) -> Result<Self> {
        check_omega(omega)?;
        let n = h.n_rows();
        check_operator("hamiltonian", h, n)?;
        check_operator("m_l", m_l, n)?;
        for ch in channels {
            if ch.from >= n || ch.to >= n {
                return Err(QswError::param("channel", format!("{ch:?} outside {n} vertices")));
            }
        }
        let rows = LocalRows::new(omega, h, m_l, channels);
        Self::distribute(&rows, n, n_workers, Some(omega))
    }

    /// Global-interaction Liouvillian
    /// `-i(1-w)[H, .] + w(i[H_rot, .] + sum_k D_k)`, with the rotating term
    /// omitted when `h_rot` is `None`.
    pub fn build_global(
        omega: f64,
        h: &SparseMatrix,
        lindblads: &[SparseMatrix],
        h_rot: Option<&SparseMatrix>,
        n_workers: usize,
    ) -> Result<Self> {
        check_omega(omega)?;
        let n = h.n_rows();
        check_operator("hamiltonian", h, n)?;
        for l in lindblads {
            check_operator("lindblad", l, n)?;
        }
        if let Some(r) = h_rot {
            check_operator("rotating_hamiltonian", r, n)?;
        }
        let rows = GlobalRows::new(omega, h, lindblads, h_rot);
        Self::distribute(&rows, n, n_workers, Some(omega))
    }

    pub fn from_operators(ops: &OperatorSet, n_workers: usize) -> Result<Self> {
        match ops.kind {
            WalkKind::Local => {
                Self::build_local(ops.omega, &ops.hamiltonian, &ops.lindblads[0], &ops.channels, n_workers)
            }
            WalkKind::Global | WalkKind::NonMoralisingGlobal => Self::build_global(
                ops.omega,
                &ops.hamiltonian,
                &ops.lindblads,
                ops.rotating_hamiltonian.as_ref(),
                n_workers,
            ),
        }
    }

    /// Distributes an arbitrary square generator (no walk structure assumed).
    pub fn from_matrix(matrix: &SparseMatrix, n_workers: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QswError::InvalidMatrix("generator must be square".into()));
        }
        let dim = matrix.n_rows();
        let mut out = Self::distribute_rows(&MatrixRows(matrix), dim, n_workers)?;
        out.system_dim = (dim as f64).sqrt().round() as usize;
        out.one_norms = one_norm_series(&out.to_csr());
        Ok(out)
    }

    fn distribute(rows: &dyn RowSource, n: usize, n_workers: usize, omega: Option<f64>) -> Result<Self> {
        let mut out = Self::distribute_rows(rows, n * n, n_workers)?;
        out.system_dim = n;
        out.omega = omega;
        out.one_norms = one_norm_series(&out.to_csr());
        Ok(out)
    }

    fn distribute_rows(rows: &dyn RowSource, dim: usize, n_workers: usize) -> Result<Self> {
        let partition = RowPartition::new(dim, n_workers)?;
        let ranges: Vec<Range<usize>> = partition.ranges().collect();
        let matrices: Vec<SparseMatrix> = ranges
            .par_iter()
            .map(|range| assemble_block(rows, range.clone(), dim))
            .collect::<Result<_>>()?;
        let plans = plan_communication(&partition, &matrices);
        let blocks = ranges
            .into_iter()
            .zip(matrices)
            .zip(plans)
            .map(|((rows, matrix), plan)| {
                let ext_cols = remap_columns(&matrix, &rows, &plan);
                LocalBlock {
                    rows,
                    matrix,
                    ext_cols,
                    plan,
                    recv_slots: Vec::new(),
                }
            })
            .collect::<Vec<_>>();
        let mut blocks = blocks;
        let slots: Vec<Vec<usize>> = blocks
            .iter()
            .enumerate()
            .map(|(w, b)| {
                b.plan
                    .recv
                    .iter()
                    .map(|ex| {
                        blocks[ex.peer]
                            .plan
                            .send
                            .iter()
                            .position(|s| s.peer == w)
                            .expect("plans are symmetric")
                    })
                    .collect()
            })
            .collect();
        for (b, s) in blocks.iter_mut().zip(slots) {
            b.recv_slots = s;
        }
        Ok(DistributedLiouvillian {
            system_dim: 0,
            partition,
            blocks,
            one_norms: Vec::new(),
            omega: None,
        })
    }

    /// Superoperator dimension (`n^2`).
    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    /// Density matrix dimension `n`.
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    pub fn partition(&self) -> &RowPartition {
        &self.partition
    }

    pub fn n_workers(&self) -> usize {
        self.partition.n_workers()
    }

    pub fn blocks(&self) -> &[LocalBlock] {
        &self.blocks
    }

    pub fn comm_plan(&self) -> Vec<&WorkerPlan> {
        self.blocks.iter().map(|b| &b.plan).collect()
    }

    /// Cached bounds on `||L^n||_1` for `n = 1..=9`.
    pub fn one_norms(&self) -> &[f64] {
        &self.one_norms
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(|b| b.matrix.nnz()).sum()
    }

    /// Fraction of entries that are zero.
    pub fn sparsity(&self) -> f64 {
        let total = (self.dim() as f64).powi(2);
        1.0 - self.nnz() as f64 / total
    }

    /// Concatenates the local blocks into one CSR matrix.
    pub fn to_csr(&self) -> SparseMatrix {
        let dim = self.dim();
        let mut row_starts = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        row_starts.push(0);
        for b in &self.blocks {
            let offset = cols.len();
            row_starts.extend(b.matrix.row_starts()[1..].iter().map(|s| s + offset));
            cols.extend_from_slice(b.matrix.col_indices());
            vals.extend_from_slice(b.matrix.values());
        }
        SparseMatrix::from_csr(dim, dim, row_starts, cols, vals).expect("blocks are canonical and cover every row")
    }

    /// `y = L x`.
    pub fn spmv(&self, x: &StateVector) -> Result<StateVector> {
        let mut y = StateVector::zeros(&self.partition);
        let mut ws = SpmvWorkspace::new(self);
        self.spmv_into(x, &mut y, &mut ws)?;
        Ok(y)
    }

    pub(crate) fn spmv_into(&self, x: &StateVector, y: &mut StateVector, ws: &mut SpmvWorkspace) -> Result<()> {
        if x.partition() != &self.partition || y.partition() != &self.partition {
            return Err(QswError::PartitionMismatch);
        }
        // below this size thread dispatch costs more than the product;
        // per-worker arithmetic is identical either way
        let parallel = self.n_workers() > 1 && self.nnz() >= PARALLEL_MIN_NNZ;
        let segments = x.segments();

        // pack
        let pack = |(w, outbox): (usize, &mut Vec<Vec<Complex64>>)| {
            let block = &self.blocks[w];
            let start = block.rows.start;
            for (buf, ex) in outbox.iter_mut().zip(&block.plan.send) {
                buf.clear();
                buf.extend(ex.indices.iter().map(|&i| segments[w][i - start]));
            }
        };
        if parallel {
            ws.outboxes.par_iter_mut().enumerate().for_each(pack);
        } else {
            ws.outboxes.iter_mut().enumerate().for_each(pack);
        }

        // receive and multiply
        let outboxes = &ws.outboxes;
        let multiply = |((w, ext), out): ((usize, &mut Vec<Complex64>), &mut Vec<Complex64>)| {
            let block = &self.blocks[w];
            ext.clear();
            ext.extend_from_slice(&segments[w]);
            for (ex, &slot) in block.plan.recv.iter().zip(&block.recv_slots) {
                ext.extend_from_slice(&outboxes[ex.peer][slot]);
            }
            let starts = block.matrix.row_starts();
            let vals = block.matrix.values();
            for (r, yr) in out.iter_mut().enumerate() {
                let mut acc = Complex64::zero();
                for idx in starts[r]..starts[r + 1] {
                    acc += vals[idx] * ext[block.ext_cols[idx]];
                }
                *yr = acc;
            }
        };
        let y_segments = y.segments_mut();
        if parallel {
            ws.ext
                .par_iter_mut()
                .enumerate()
                .zip(y_segments.par_iter_mut())
                .for_each(multiply);
        } else {
            ws.ext
                .iter_mut()
                .enumerate()
                .zip(y_segments.iter_mut())
                .for_each(multiply);
        }
        Ok(())
    }
}

/// Reusable message and halo buffers for repeated products.
pub(crate) struct SpmvWorkspace {
    outboxes: Vec<Vec<Vec<Complex64>>>,
    ext: Vec<Vec<Complex64>>,
}

impl SpmvWorkspace {
    pub(crate) fn new(l: &DistributedLiouvillian) -> Self {
        SpmvWorkspace {
            outboxes: l
                .blocks
                .iter()
                .map(|b| {
                    b.plan
                        .send
                        .iter()
                        .map(|e| Vec::with_capacity(e.indices.len()))
                        .collect()
                })
                .collect(),
            ext: l
                .blocks
                .iter()
                .map(|b| Vec::with_capacity(b.rows.len() + b.plan.recv_len()))
                .collect(),
        }
    }
}

fn assemble_block(rows: &dyn RowSource, range: Range<usize>, dim: usize) -> Result<SparseMatrix> {
    let mut entries = Vec::new();
    let mut row_starts = Vec::with_capacity(range.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_starts.push(0);
    for k in range.clone() {
        entries.clear();
        rows.push_row(k, &mut entries);
        canonical_row(&mut entries, &mut cols, &mut vals);
        row_starts.push(cols.len());
    }
    SparseMatrix::from_csr(range.len(), dim, row_starts, cols, vals)
}

/// Derives the per-worker receive lists from the off-range columns of each
/// block, and the matching send lists by transposing them.
pub fn plan_communication(partition: &RowPartition, blocks: &[SparseMatrix]) -> Vec<WorkerPlan> {
    let n_workers = partition.n_workers();
    let mut plans: Vec<WorkerPlan> = vec![WorkerPlan::default(); n_workers];
    for (w, block) in blocks.iter().enumerate() {
        let own = partition.range(w);
        let mut needed: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut cols: Vec<usize> = block
            .col_indices()
            .iter()
            .copied()
            .filter(|c| !own.contains(c))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        for c in cols {
            needed.entry(partition.owner(c)).or_default().push(c);
        }
        plans[w].recv = needed
            .into_iter()
            .map(|(peer, indices)| Exchange { peer, indices })
            .collect();
    }
    for w in 0..n_workers {
        let recv = plans[w].recv.clone();
        for ex in recv {
            plans[ex.peer].send.push(Exchange {
                peer: w,
                indices: ex.indices,
            });
        }
    }
    for plan in &mut plans {
        plan.send.sort_by_key(|e| e.peer);
    }
    plans
}

fn remap_columns(matrix: &SparseMatrix, own: &Range<usize>, plan: &WorkerPlan) -> Vec<usize> {
    let mut halo_pos = BTreeMap::new();
    let mut next = own.len();
    for ex in &plan.recv {
        for &i in &ex.indices {
            halo_pos.insert(i, next);
            next += 1;
        }
    }
    matrix
        .col_indices()
        .iter()
        .map(|&c| if own.contains(&c) { c - own.start } else { halo_pos[&c] })
        .collect()
}
