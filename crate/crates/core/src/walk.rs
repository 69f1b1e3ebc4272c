//! Stateful walk systems: build, set an initial state, evolve, measure.

use log::warn;
use num_complex::Complex64;

use crate::error::{QswError, Result};
use crate::expm::{self, ExpmConfig, SeriesResult};
use crate::operators::{
    check_probabilities, nm_measure, nm_rho_map, Channel, OperatorSet, VertexSubspaces, WalkKind, NORMALISATION_TOL,
};
use crate::sparse::SparseMatrix;
use crate::superop::{DistributedLiouvillian, StateVector};

/// Dense row-major density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

const HERMITIAN_STATE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
/// Largest dimension for which positivity is checked.
const POSITIVITY_CHECK_DIM: usize = 64;

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and (for small matrices) positivity.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let rho = DensityMatrix::unchecked(dim, entries)?;
        let defect = rho.hermitian_defect();
        if defect > HERMITIAN_STATE_TOL {
            return Err(QswError::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORMALISATION_TOL || tr.im.abs() > NORMALISATION_TOL {
            return Err(QswError::InvalidState(format!("trace is {tr}, expected 1")));
        }
        if dim <= POSITIVITY_CHECK_DIM && !rho.is_positive_semidefinite(POSITIVITY_TOL) {
            return Err(QswError::InvalidState("matrix has a negative eigenvalue".into()));
        }
        Ok(rho)
    }

    fn unchecked(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QswError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// Diagonal state from a probability vector.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        check_probabilities(p)?;
        let n = p.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &pi) in p.iter().enumerate() {
            entries[i * n + i] = Complex64::new(pi, 0.0);
        }
        Ok(DensityMatrix { dim: n, entries })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::from_populations(&vec![1.0 / n as f64; n]).expect("uniform distribution")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `max |rho - rho^dag|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }

    /// Column-major vectorization: index `n * j + i` holds `rho[i][j]`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let n = self.dim;
        (0..n * n).map(|k| self.get(k % n, k / n)).collect()
    }

    fn from_vectorized(n: usize, v: &[Complex64]) -> Self {
        let entries = (0..n * n).map(|k| v[n * (k % n) + k / n]).collect();
        DensityMatrix { dim: n, entries }
    }

    /// Cholesky factorisation of `rho + tol I`.
    fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

/// How to seed the walk.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Diagonal state; for non-moralising systems these are per original vertex.
    Populations(Vec<f64>),
    Density(DensityMatrix),
}

/// A walk variant with its assembled Liouvillian and current state.
#[derive(Clone, Debug)]
pub struct WalkSystem {
    operators: OperatorSet,
    liouvillian: DistributedLiouvillian,
    state: Option<StateVector>,
    base_vertex_count: usize,
    n_workers: usize,
    expm: ExpmConfig,
}

impl WalkSystem {
    /// Local-interaction walk on `h`, `m_l` (both `N x N`) with sources and
    /// sinks given as `(vertex, rate)`. Sources are numbered `N..`, then sinks.
    pub fn new_lqsw(
        omega: f64,
        h: &SparseMatrix,
        m_l: &SparseMatrix,
        sources: &[(usize, f64)],
        sinks: &[(usize, f64)],
        n_workers: usize,
    ) -> Result<Self> {
        let n = h.n_rows();
        let total = n + sources.len() + sinks.len();
        let mut channels = Vec::with_capacity(sources.len() + sinks.len());
        for (k, &(target, rate)) in sources.iter().enumerate() {
            check_attachment("source", target, n)?;
            channels.push(Channel {
                from: n + k,
                to: target,
                rate,
            });
        }
        for (k, &(origin, rate)) in sinks.iter().enumerate() {
            check_attachment("sink", origin, n)?;
            channels.push(Channel {
                from: origin,
                to: n + sources.len() + k,
                rate,
            });
        }
        if m_l.n_rows() != n || m_l.n_cols() != n {
            return Err(QswError::DimensionMismatch {
                expected: n,
                found: m_l.n_rows(),
            });
        }
        let operators = OperatorSet::local(omega, h.padded(total)?, m_l.padded(total)?, channels)?;
        Self::from_operators(operators, n, n_workers)
    }

    /// Global-interaction walk. Supplying both `h_rot` and `vsets` selects
    /// the non-moralising variant.
    pub fn new_gqsw(
        omega: f64,
        h: &SparseMatrix,
        lindblads: &[SparseMatrix],
        h_rot: Option<&SparseMatrix>,
        vsets: Option<&VertexSubspaces>,
        n_workers: usize,
    ) -> Result<Self> {
        let operators = OperatorSet::global(omega, h.clone(), lindblads.to_vec(), h_rot.cloned(), vsets.cloned())?;
        let base = vsets.map_or(h.n_rows(), |v| v.n_vertices());
        Self::from_operators(operators, base, n_workers)
    }

    fn from_operators(operators: OperatorSet, base_vertex_count: usize, n_workers: usize) -> Result<Self> {
        let liouvillian = DistributedLiouvillian::from_operators(&operators, n_workers)?;
        Ok(WalkSystem {
            operators,
            liouvillian,
            state: None,
            base_vertex_count,
            n_workers,
            expm: ExpmConfig::default(),
        })
    }

    pub fn kind(&self) -> WalkKind {
        self.operators.kind
    }

    pub fn omega(&self) -> f64 {
        self.operators.omega
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.operators
    }

    pub fn liouvillian(&self) -> &DistributedLiouvillian {
        &self.liouvillian
    }

    pub fn subspaces(&self) -> Option<&VertexSubspaces> {
        self.operators.subspaces.as_ref()
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn expm_config(&self) -> &ExpmConfig {
        &self.expm
    }

    /// `N`: vertices before augmentation or expansion.
    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }

    /// Dimension of the density matrix (augmented or expanded).
    pub fn augmented_count(&self) -> usize {
        self.operators.dim()
    }

    /// Number of entries reported by [`gather_populations`](Self::gather_populations).
    pub fn measured_count(&self) -> usize {
        match self.subspaces() {
            Some(v) => v.n_vertices(),
            None => self.augmented_count(),
        }
    }

    /// Augmented adjacency: `M_L` with every source and sink arc of weight
    /// equal to its rate.
    pub fn augmented_matrix(&self) -> SparseMatrix {
        let n = self.augmented_count();
        let base = self
            .operators
            .lindblads
            .first()
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(n, n));
        let extra = self
            .operators
            .channels
            .iter()
            .map(|ch| (ch.to, ch.from, Complex64::new(ch.rate, 0.0)));
        SparseMatrix::from_triplets(n, n, base.iter().chain(extra)).expect("indices checked at build")
    }

    /// Rebuilds the Liouvillian at a new `omega`; the state is kept.
    pub fn set_omega(&mut self, omega: f64) -> Result<()> {
        let mut ops = self.operators.clone();
        ops.omega = omega;
        let liouvillian = DistributedLiouvillian::from_operators(&ops, self.n_workers)?;
        self.operators = ops;
        self.liouvillian = liouvillian;
        Ok(())
    }

    pub fn set_tolerance(&mut self, tolerance: f64) -> Result<()> {
        self.expm = ExpmConfig::new(tolerance)?;
        Ok(())
    }

    pub fn initial_state(&mut self, spec: InitialState) -> Result<()> {
        let n = self.augmented_count();
        let rho = match spec {
            InitialState::Populations(p) => match self.subspaces() {
                Some(vsets) => DensityMatrix::from_populations(&nm_rho_map(&p, vsets)?)?,
                None => {
                    if p.len() != n {
                        return Err(QswError::DimensionMismatch {
                            expected: n,
                            found: p.len(),
                        });
                    }
                    DensityMatrix::from_populations(&p)?
                }
            },
            InitialState::Density(rho) => {
                if rho.dim() != n {
                    return Err(QswError::DimensionMismatch {
                        expected: n,
                        found: rho.dim(),
                    });
                }
                rho
            }
        };
        self.state = Some(StateVector::from_global(
            &rho.vectorize(),
            self.liouvillian.partition(),
        )?);
        Ok(())
    }

    pub fn state(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }

    fn current(&self) -> Result<&StateVector> {
        self.state.as_ref().ok_or(QswError::NoState)
    }

    /// Evolves the stored state by `t`.
    pub fn step(&mut self, t: f64) -> Result<()> {
        let next = expm::step(&self.liouvillian, self.current()?, t, &self.expm)?;
        self.state = Some(next);
        Ok(())
    }

    /// States at `t1 + k (tq - t1) / steps` measured from the stored state.
    /// Afterwards the stored state is the one at `tq`.
    pub fn series(&mut self, t1: f64, tq: f64, steps: usize) -> Result<SeriesResult> {
        let out = expm::series(&self.liouvillian, self.current()?, t1, tq, steps, &self.expm)?;
        self.state = out.states.last().cloned();
        Ok(out)
    }

    pub fn gather_result(&self) -> Result<DensityMatrix> {
        Ok(self.density_of(self.current()?))
    }

    /// Real diagonal, folded onto the original vertices for non-moralising walks.
    pub fn gather_populations(&self) -> Result<Vec<f64>> {
        Ok(self.populations_of(self.current()?))
    }

    pub fn density_of(&self, v: &StateVector) -> DensityMatrix {
        DensityMatrix::from_vectorized(self.augmented_count(), &v.gather())
    }

    pub fn populations_of(&self, v: &StateVector) -> Vec<f64> {
        let n = self.augmented_count();
        let mut diag = vec![0.0; n];
        let mut k = 0;
        for seg in v.segments() {
            for x in seg {
                if k % (n + 1) == 0 {
                    diag[k / (n + 1)] = x.re;
                }
                k += 1;
            }
        }
        match self.subspaces() {
            Some(vsets) => nm_measure(&diag, vsets),
            None => diag,
        }
    }
}

fn check_attachment(kind: &'static str, v: usize, n: usize) -> Result<()> {
    if v >= n {
        return Err(QswError::param(kind, format!("vertex {v} outside {n} vertices")));
    }
    Ok(())
}

/// Upper limit beyond which the sink is considered not yet saturated.
const EST_SATURATION_TOL: f64 = 1e-4;

/// `int (1 - p(t)) dt` over evenly spaced samples by composite Simpson.
///
/// Needs an odd number of samples (even interval count), at least three.
/// Logs a warning when the final sink population is below `1 - 1e-4`.
pub fn expected_survival_time(times: &[f64], p_sink: &[f64]) -> Result<f64> {
    if times.len() != p_sink.len() {
        return Err(QswError::DimensionMismatch {
            expected: times.len(),
            found: p_sink.len(),
        });
    }
    if times.len() < 3 {
        return Err(QswError::param("times", "at least three samples are required"));
    }
    let intervals = times.len() - 1;
    if !intervals.is_multiple_of(2) {
        return Err(QswError::param(
            "times",
            format!("Simpson needs an even interval count, got {intervals}"),
        ));
    }
    let h = (times[intervals] - times[0]) / intervals as f64;
    if !(h > 0.0) {
        return Err(QswError::param("times", "samples must increase"));
    }
    let uneven = times
        .iter()
        .enumerate()
        .any(|(k, &t)| (t - (times[0] + k as f64 * h)).abs() > 1e-9 * h.max(1.0) * intervals as f64);
    if uneven {
        return Err(QswError::param("times", "samples must be evenly spaced"));
    }
    let last = p_sink[intervals];
    if 1.0 - last > EST_SATURATION_TOL {
        warn!(
            "sink population reaches only {last} by t = {}; survival time is truncated",
            times[intervals]
        );
    }
    let f = |k: usize| 1.0 - p_sink[k];
    let mut acc = f(0) + f(intervals);
    for k in 1..intervals {
        acc += if k % 2 == 1 { 4.0 * f(k) } else { 2.0 * f(k) };
    }
    Ok(acc * h / 3.0)
}
