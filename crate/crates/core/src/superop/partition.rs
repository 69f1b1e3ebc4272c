use std::ops::Range;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{QswError, Result};

/// Contiguous near-equal row split of `[0, dim)` across workers.
///
/// The first `dim % n_workers` workers receive one extra row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowPartition {
    bounds: Vec<usize>,
}

impl RowPartition {
    pub fn new(dim: usize, n_workers: usize) -> Result<Self> {
        if n_workers == 0 {
            return Err(QswError::param("n_workers", "at least one worker is required"));
        }
        let base = dim / n_workers;
        let extra = dim % n_workers;
        let mut bounds = Vec::with_capacity(n_workers + 1);
        bounds.push(0);
        for w in 0..n_workers {
            let len = base + usize::from(w < extra);
            bounds.push(bounds[w] + len);
        }
        Ok(RowPartition { bounds })
    }

    pub fn dim(&self) -> usize {
        *self.bounds.last().unwrap()
    }

    pub fn n_workers(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn range(&self, worker: usize) -> Range<usize> {
        self.bounds[worker]..self.bounds[worker + 1]
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.n_workers()).map(|w| self.range(w))
    }

    /// Worker holding global index `i`.
    pub fn owner(&self, i: usize) -> usize {
        // last bound <= i, skipping empty ranges
        self.bounds.partition_point(|&b| b <= i) - 1
    }
}

/// Vectorized density matrix split across workers.
///
/// Global index `k = n * j + i` holds `rho[i][j]` (column-major stacking).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    partition: RowPartition,
    segments: Vec<Vec<Complex64>>,
}

impl StateVector {
    pub fn zeros(partition: &RowPartition) -> Self {
        let segments = partition.ranges().map(|r| vec![Complex64::zero(); r.len()]).collect();
        StateVector {
            partition: partition.clone(),
            segments,
        }
    }

    pub fn from_global(values: &[Complex64], partition: &RowPartition) -> Result<Self> {
        if values.len() != partition.dim() {
            return Err(QswError::DimensionMismatch {
                expected: partition.dim(),
                found: values.len(),
            });
        }
        let segments = partition.ranges().map(|r| values[r].to_vec()).collect();
        Ok(StateVector {
            partition: partition.clone(),
            segments,
        })
    }

    pub fn partition(&self) -> &RowPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn segments(&self) -> &[Vec<Complex64>] {
        &self.segments
    }

    pub(crate) fn segments_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.segments
    }

    /// Concatenates the segments into the full vector.
    pub fn gather(&self) -> Vec<Complex64> {
        self.segments.concat()
    }

    /// Same vector on a different worker layout.
    pub fn repartition(&self, partition: &RowPartition) -> Result<Self> {
        Self::from_global(&self.gather(), partition)
    }

    pub fn norm_inf(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.segments
            .iter()
            .flat_map(|s| s.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub(crate) fn copy_from(&mut self, other: &StateVector) {
        for (dst, src) in self.segments.iter_mut().zip(&other.segments) {
            dst.copy_from_slice(src);
        }
    }

    pub(crate) fn scale(&mut self, factor: Complex64) {
        for seg in &mut self.segments {
            seg.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// `self += factor * other`
    pub(crate) fn axpy(&mut self, factor: Complex64, other: &StateVector) {
        for (dst, src) in self.segments.iter_mut().zip(&other.segments) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += factor * s;
            }
        }
    }
}
