//! Action of the matrix exponential by truncated Taylor series with scaling.
//!
//! `exp(tA) v` is approximated by `s` applications of the degree-`m` Taylor
//! polynomial of `tA / s`. The pair `(m, s)` minimises `m * s` subject to the
//! backward-error bound encoded in the theta table, using the cached 1-norms
//! of the powers of `A`. No balancing and no trace shift are applied.
//!
//! Negative `t` is accepted. The generator is not skew-Hermitian, so reverse
//! evolution is generally ill-conditioned and may leave the set of density
//! matrices.

mod theta;
#[rustfmt::skip]
#[allow(clippy::excessive_precision)]
mod theta_table;

pub use theta::{build_theta_table, compute_theta_table, DOUBLE_TOLERANCE, M_MAX};

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{QswError, Result};
use crate::superop::{DistributedLiouvillian, SpmvWorkspace, StateVector};

/// Largest `p` used in the `alpha_p` norm estimates.
pub const P_MAX: usize = 8;

/// Upper limit on the scaling parameter `s`; larger spans are refused.
pub const MAX_SCALING_STEPS: usize = 1 << 32;

/// Tolerance and matching theta table.
#[derive(Clone, Debug)]
pub struct ExpmConfig {
    tolerance: f64,
    theta: Arc<[f64]>,
}

impl Default for ExpmConfig {
    fn default() -> Self {
        Self::new(DOUBLE_TOLERANCE).expect("double tolerance is valid")
    }
}

impl ExpmConfig {
    pub fn new(tolerance: f64) -> Result<Self> {
        Ok(ExpmConfig {
            tolerance,
            theta: build_theta_table(tolerance)?,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `theta()[m - 1]` is `theta_m`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

/// Taylor degree and number of scaling steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaylorParameters {
    pub m_star: usize,
    pub s: usize,
}

impl TaylorParameters {
    /// `m_star = 0` means `exp(tA) v = v` to working precision.
    pub fn is_trivial(&self) -> bool {
        self.m_star == 0
    }

    pub fn cost(&self) -> usize {
        self.m_star.saturating_mul(self.s)
    }
}

fn ceil_ratio(x: f64, theta: f64) -> usize {
    ((x / theta).ceil() as usize).max(1)
}

/// Chooses `(m_star, s)` for `exp(tA)` given `one_norms[n-1] >= ||A^n||_1`.
pub fn select_parameters(one_norms: &[f64], t: f64, theta: &[f64]) -> TaylorParameters {
    let m_max = theta.len();
    let scale = t.abs();
    let norm = scale * one_norms.first().copied().unwrap_or(0.0);
    if norm == 0.0 {
        return TaylorParameters { m_star: 0, s: 1 };
    }
    let mut best = TaylorParameters { m_star: 0, s: 0 };
    let mut consider = |m: usize, s: usize| {
        if best.m_star == 0 || m.saturating_mul(s) < best.cost() {
            best = TaylorParameters { m_star: m, s };
        }
    };
    let ell = 2.0;
    let p_max = P_MAX as f64;
    let bound = 2.0 * ell * p_max * (p_max + 3.0) * theta[m_max - 1] / m_max as f64;
    let p_limit = P_MAX.min(one_norms.len().saturating_sub(1));
    if norm <= bound || p_limit < 2 {
        for (i, &th) in theta.iter().enumerate() {
            consider(i + 1, ceil_ratio(norm, th));
        }
    } else {
        let d = |p: usize| scale * one_norms[p - 1].powf(1.0 / p as f64);
        for p in 2..=p_limit {
            let alpha = d(p).max(d(p + 1));
            for m in p * (p - 1) - 1..=m_max {
                consider(m, ceil_ratio(alpha, theta[m - 1]));
            }
        }
    }
    best
}

struct Runner<'a> {
    l: &'a DistributedLiouvillian,
    ws: SpmvWorkspace,
    tol: f64,
}

impl<'a> Runner<'a> {
    fn new(l: &'a DistributedLiouvillian, cfg: &ExpmConfig) -> Self {
        Runner {
            l,
            ws: SpmvWorkspace::new(l),
            tol: cfg.tolerance,
        }
    }

    /// `b <- factor * L b`, using `tmp` as scratch.
    fn apply(&mut self, b: &mut StateVector, tmp: &mut StateVector, factor: f64) -> Result<()> {
        self.l.spmv_into(b, tmp, &mut self.ws)?;
        std::mem::swap(b, tmp);
        b.scale(Complex64::new(factor, 0.0));
        Ok(())
    }

    fn taylor_steps(&mut self, v: &StateVector, t: f64, params: TaylorParameters) -> Result<StateVector> {
        let mut f = v.clone();
        if params.is_trivial() || t == 0.0 {
            return Ok(f);
        }
        let mut b = v.clone();
        let mut tmp = StateVector::zeros(v.partition());
        let h = t / params.s as f64;
        for _ in 0..params.s {
            let mut c1 = b.norm_inf();
            for j in 1..=params.m_star {
                self.apply(&mut b, &mut tmp, h / j as f64)?;
                let c2 = b.norm_inf();
                f.axpy(Complex64::new(1.0, 0.0), &b);
                if c1 + c2 <= self.tol * f.norm_inf() {
                    break;
                }
                c1 = c2;
            }
            if !f.is_finite() {
                return Err(QswError::NonFinite("Taylor iteration"));
            }
            b.copy_from(&f);
        }
        Ok(f)
    }
}

/// [`select_parameters`] with the operator norm and step count checked.
fn checked_parameters(l: &DistributedLiouvillian, t: f64, cfg: &ExpmConfig) -> Result<TaylorParameters> {
    if !l.one_norms().iter().all(|x| x.is_finite()) {
        return Err(QswError::NonFinite("operator norm"));
    }
    let params = select_parameters(l.one_norms(), t, cfg.theta());
    if params.s > MAX_SCALING_STEPS {
        return Err(QswError::param(
            "t",
            format!("time {t} needs more than {MAX_SCALING_STEPS} scaling steps"),
        ));
    }
    Ok(params)
}

fn check_vector(l: &DistributedLiouvillian, v: &StateVector) -> Result<()> {
    if v.dim() != l.dim() {
        return Err(QswError::DimensionMismatch {
            expected: l.dim(),
            found: v.dim(),
        });
    }
    if v.partition() != l.partition() {
        return Err(QswError::PartitionMismatch);
    }
    if !v.is_finite() {
        return Err(QswError::NonFinite("input vector"));
    }
    Ok(())
}

/// `exp(t L) v`.
pub fn step(l: &DistributedLiouvillian, v: &StateVector, t: f64, cfg: &ExpmConfig) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(QswError::param("t", format!("must be finite, got {t}")));
    }
    check_vector(l, v)?;
    let params = checked_parameters(l, t, cfg)?;
    Runner::new(l, cfg).taylor_steps(v, t, params)
}

/// States at evenly spaced times, with the parameters chosen for the whole span.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub parameters: TaylorParameters,
}

/// `exp(t_k L) v` for `t_k = t1 + k (tq - t1) / steps`, `k = 0..=steps`.
///
/// Parameters are selected once for `(tq - t1) L`. When the span needs at
/// least as many scaling steps as there are output intervals, each block
/// of consecutive intervals shares one set of Taylor vectors; otherwise every
/// interval is a separate step.
pub fn series(
    l: &DistributedLiouvillian,
    v: &StateVector,
    t1: f64,
    tq: f64,
    steps: usize,
    cfg: &ExpmConfig,
) -> Result<SeriesResult> {
    if !(t1.is_finite() && tq.is_finite()) || tq <= t1 {
        return Err(QswError::param("tq", format!("need finite t1 < tq, got [{t1}, {tq}]")));
    }
    if steps == 0 {
        return Err(QswError::param("steps", "at least one step is required"));
    }
    check_vector(l, v)?;
    let q = steps;
    let h = (tq - t1) / q as f64;
    let times: Vec<f64> = (0..=q).map(|k| t1 + k as f64 * h).collect();
    let mut runner = Runner::new(l, cfg);

    let start_params = checked_parameters(l, t1, cfg)?;
    let first = runner.taylor_steps(v, t1, start_params)?;
    let params = select_parameters(l.one_norms(), tq - t1, cfg.theta());
    let mut states = Vec::with_capacity(q + 1);
    states.push(first);

    if params.is_trivial() {
        let v0 = states[0].clone();
        states.resize(q + 1, v0);
        return Ok(SeriesResult {
            times,
            states,
            parameters: params,
        });
    }

    if q < params.s {
        let per_step = checked_parameters(l, h, cfg)?;
        for _ in 0..q {
            let next = runner.taylor_steps(states.last().unwrap(), h, per_step)?;
            states.push(next);
        }
        return Ok(SeriesResult {
            times,
            states,
            parameters: params,
        });
    }

    let d = q / params.s;
    let n_blocks = q.div_ceil(d);
    let mut tmp = StateVector::zeros(v.partition());
    for block in 0..n_blocks {
        let len = if block + 1 == n_blocks { q - block * d } else { d };
        // K_p = h^p / p! L^p z
        let mut terms: Vec<StateVector> = vec![states.last().unwrap().clone()];
        for k in 1..=len {
            let kf = k as f64;
            let mut f = terms[0].clone();
            let mut c1 = terms[0].norm_inf();
            let mut scale = 1.0;
            for p in 1..=params.m_star {
                if terms.len() <= p {
                    let mut next = terms[p - 1].clone();
                    runner.apply(&mut next, &mut tmp, h / p as f64)?;
                    terms.push(next);
                }
                scale *= kf;
                f.axpy(Complex64::new(scale, 0.0), &terms[p]);
                let c2 = scale * terms[p].norm_inf();
                if c1 + c2 <= runner.tol * f.norm_inf() {
                    break;
                }
                c1 = c2;
            }
            if !f.is_finite() {
                return Err(QswError::NonFinite("Taylor series block"));
            }
            states.push(f);
        }
    }
    Ok(SeriesResult {
        times,
        states,
        parameters: params,
    })
}
