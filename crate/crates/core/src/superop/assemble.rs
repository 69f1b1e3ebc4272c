//! Row-wise assembly of the vectorized Liouvillian.
//!
//! With column-major stacking (`k = n * q + p` holds `rho[p][q]`):
//!
//! * `H rho`        -> row `(p, q)` picks `H[p][r]` at column `(r, q)`
//! * `rho H`        -> row `(p, q)` picks `H[r][q]` at column `(p, r)`
//! * `L rho L^dag`  -> row `(p, q)` picks `L[p][r] conj(L[q][s])` at `(r, s)`
//!
//! Rows are produced independently, so any worker can build any row range
//! without Kronecker intermediates.

use num_complex::Complex64;
use num_traits::Zero;

use crate::operators::Channel;
use crate::sparse::SparseMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) trait RowSource: Sync {
    /// Appends the raw (unsorted, possibly duplicated) entries of row `k`.
    fn push_row(&self, k: usize, out: &mut Vec<(usize, Complex64)>);
}

/// Sorts by column, sums duplicates in push order and drops zeros.
pub(crate) fn canonical_row(entries: &mut [(usize, Complex64)], cols: &mut Vec<usize>, vals: &mut Vec<Complex64>) {
    entries.sort_by_key(|&(c, _)| c);
    let mut i = 0;
    while i < entries.len() {
        let (c, mut acc) = entries[i];
        let mut j = i + 1;
        while j < entries.len() && entries[j].0 == c {
            acc += entries[j].1;
            j += 1;
        }
        if !acc.is_zero() {
            cols.push(c);
            vals.push(acc);
        }
        i = j;
    }
}

fn push_commutator(
    n: usize,
    p: usize,
    q: usize,
    h: &SparseMatrix,
    h_t: &SparseMatrix,
    coeff: Complex64,
    out: &mut Vec<(usize, Complex64)>,
) {
    // coeff * (H rho - rho H)
    let (cols, vals) = h.row(p);
    for (&r, &x) in cols.iter().zip(vals) {
        out.push((n * q + r, coeff * x));
    }
    let (cols, vals) = h_t.row(q);
    for (&r, &x) in cols.iter().zip(vals) {
        out.push((n * r + p, -coeff * x));
    }
}

/// Local-interaction walk built from `H` and the condensed matrix `M_L`.
pub(crate) struct LocalRows {
    n: usize,
    coherent: Complex64,
    omega: f64,
    h: SparseMatrix,
    h_t: SparseMatrix,
    /// `|M_L[i][j]|^2`, rows indexed by destination.
    jump: SparseMatrix,
    /// Column sums of `jump`: total decay out of each vertex.
    decay: Vec<f64>,
    channels_in: Vec<Vec<(usize, f64)>>,
    channel_decay: Vec<f64>,
}

impl LocalRows {
    pub(crate) fn new(omega: f64, h: &SparseMatrix, m_l: &SparseMatrix, channels: &[Channel]) -> Self {
        let n = h.n_rows();
        let jump = m_l.map(|v| Complex64::new(v.norm_sqr(), 0.0));
        let mut decay = vec![0.0; n];
        for (_, c, v) in jump.iter() {
            decay[c] += v.re;
        }
        let mut channels_in = vec![Vec::new(); n];
        let mut channel_decay = vec![0.0; n];
        for ch in channels {
            channels_in[ch.to].push((ch.from, ch.rate));
            channel_decay[ch.from] += ch.rate;
        }
        LocalRows {
            n,
            coherent: -I * (1.0 - omega),
            omega,
            h: h.clone(),
            h_t: h.transpose(),
            jump,
            decay,
            channels_in,
            channel_decay,
        }
    }
}

impl RowSource for LocalRows {
    fn push_row(&self, k: usize, out: &mut Vec<(usize, Complex64)>) {
        let n = self.n;
        let (q, p) = (k / n, k % n);
        push_commutator(n, p, q, &self.h, &self.h_t, self.coherent, out);
        if p == q {
            let (cols, vals) = self.jump.row(p);
            for (&j, &x) in cols.iter().zip(vals) {
                out.push((n * j + j, x * self.omega));
            }
            for &(from, rate) in &self.channels_in[p] {
                out.push((n * from + from, Complex64::new(rate, 0.0)));
            }
        }
        let diag =
            -0.5 * self.omega * (self.decay[p] + self.decay[q]) - 0.5 * (self.channel_decay[p] + self.channel_decay[q]);
        out.push((k, Complex64::new(diag, 0.0)));
    }
}

struct Dissipator {
    l: SparseMatrix,
    /// `L^dag L`
    k: SparseMatrix,
    k_t: SparseMatrix,
}

/// Global-interaction walk with explicit Lindblad operators and an optional
/// rotating Hamiltonian inside the decoherent part.
pub(crate) struct GlobalRows {
    n: usize,
    coherent: Complex64,
    omega: f64,
    h: SparseMatrix,
    h_t: SparseMatrix,
    rotating: Option<(SparseMatrix, SparseMatrix)>,
    dissipators: Vec<Dissipator>,
}

impl GlobalRows {
    pub(crate) fn new(omega: f64, h: &SparseMatrix, lindblads: &[SparseMatrix], h_rot: Option<&SparseMatrix>) -> Self {
        let dissipators = lindblads
            .iter()
            .map(|l| {
                let k = l.adjoint().matmul(l).expect("square operators of matching size");
                let k_t = k.transpose();
                Dissipator { l: l.clone(), k, k_t }
            })
            .collect();
        GlobalRows {
            n: h.n_rows(),
            coherent: -I * (1.0 - omega),
            omega,
            h: h.clone(),
            h_t: h.transpose(),
            rotating: h_rot.map(|r| (r.clone(), r.transpose())),
            dissipators,
        }
    }
}

impl RowSource for GlobalRows {
    fn push_row(&self, k: usize, out: &mut Vec<(usize, Complex64)>) {
        let n = self.n;
        let (q, p) = (k / n, k % n);
        push_commutator(n, p, q, &self.h, &self.h_t, self.coherent, out);
        if let Some((r, r_t)) = &self.rotating {
            push_commutator(n, p, q, r, r_t, I * self.omega, out);
        }
        let w = self.omega;
        let half = Complex64::new(-0.5 * w, 0.0);
        for d in &self.dissipators {
            let (pc, pv) = d.l.row(p);
            let (qc, qv) = d.l.row(q);
            for (&r, &a) in pc.iter().zip(pv) {
                for (&s, &b) in qc.iter().zip(qv) {
                    out.push((n * s + r, a * b.conj() * w));
                }
            }
            let (cols, vals) = d.k.row(p);
            for (&r, &x) in cols.iter().zip(vals) {
                out.push((n * q + r, half * x));
            }
            let (cols, vals) = d.k_t.row(q);
            for (&s, &x) in cols.iter().zip(vals) {
                out.push((n * s + p, half * x));
            }
        }
    }
}

/// Wraps an already assembled matrix so it can be distributed.
pub(crate) struct MatrixRows<'a>(pub(crate) &'a SparseMatrix);

impl RowSource for MatrixRows<'_> {
    fn push_row(&self, k: usize, out: &mut Vec<(usize, Complex64)>) {
        let (cols, vals) = self.0.row(k);
        out.extend(cols.iter().copied().zip(vals.iter().copied()));
    }
}
