//! Backward-error thresholds for truncated Taylor approximation.
//!
//! `theta_m` is the largest `theta` for which the absolute-coefficient series
//! of `log(exp(-x) T_m(x))`, divided by `x`, stays below the tolerance at
//! `x = theta`. The series coefficients are computed exactly in integer
//! arithmetic, so only the final sum and root bracketing run in `f64`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::theta_table::THETA_DOUBLE;
use crate::error::{QswError, Result};

/// Largest Taylor degree considered.
pub const M_MAX: usize = 55;

/// Terms of the log series kept beyond the leading one.
const EXTRA_TERMS: usize = 150;

/// Unit roundoff for IEEE double precision.
pub const DOUBLE_TOLERANCE: f64 = 1.0 / 9007199254740992.0;

/// `theta_m` for `m = 1..=55` at the given tolerance, memoised per tolerance.
///
/// At the double-precision tolerance the shipped table is returned; other
/// tolerances are computed on first use.
pub fn build_theta_table(tolerance: f64) -> Result<Arc<[f64]>> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(QswError::param(
            "tolerance",
            format!("must lie in (0, 1), got {tolerance}"),
        ));
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<[f64]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert(DOUBLE_TOLERANCE.to_bits(), Arc::from(&THETA_DOUBLE[..]));
        Mutex::new(m)
    });
    if let Some(t) = cache.lock().expect("theta cache").get(&tolerance.to_bits()) {
        return Ok(t.clone());
    }
    let table: Arc<[f64]> = compute_theta_table(tolerance).into();
    cache
        .lock()
        .expect("theta cache")
        .insert(tolerance.to_bits(), table.clone());
    Ok(table)
}

/// Bypasses the cache and the shipped table.
pub fn compute_theta_table(tolerance: f64) -> Vec<f64> {
    let pascal = pascal_rows(M_MAX + 1 + EXTRA_TERMS);
    (1..=M_MAX)
        .map(|m| {
            let coeffs = abs_log_coefficients(m, &pascal);
            solve_theta(m, &coeffs, tolerance)
        })
        .collect()
}

fn pascal_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..n {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(i + 1);
        row.push(BigInt::one());
        for k in 1..i {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows
}

/// `|c_n|` for the series `log(exp(-x) T_m(x)) = sum c_n x^n`, `n < m + 1 + EXTRA_TERMS`.
///
/// Works with exponential generating function coefficients (`n!` times the
/// ordinary ones), which are integers for both `exp(-x) T_m(x)` and its log.
fn abs_log_coefficients(m: usize, pascal: &[Vec<BigInt>]) -> Vec<f64> {
    let n_terms = m + 1 + EXTRA_TERMS;
    // a_n = n! [x^n] exp(-x) T_m(x): 1 at n = 0, 0 for 1..=m, then
    // -(-1)^(n-m-1) C(n-1, m)
    let a: Vec<BigInt> = (0..n_terms)
        .map(|n| {
            if n == 0 {
                BigInt::one()
            } else if n <= m {
                BigInt::zero()
            } else {
                let c = pascal[n - 1][m].clone();
                if (n - m - 1).is_multiple_of(2) {
                    -c
                } else {
                    c
                }
            }
        })
        .collect();
    // log via f' = f g': b_n = a_n - sum_{k=1}^{n-1} C(n-1, k-1) b_k a_{n-k}
    let mut b: Vec<BigInt> = vec![BigInt::zero(); n_terms];
    for n in m + 1..n_terms {
        let mut acc = a[n].clone();
        for k in m + 1..n.saturating_sub(m) {
            acc -= &pascal[n - 1][k - 1] * &b[k] * &a[n - k];
        }
        b[n] = acc;
    }
    let mut factorial = BigInt::one();
    let mut out = Vec::with_capacity(n_terms);
    for (n, bn) in b.iter().enumerate() {
        if n > 0 {
            factorial *= n;
        }
        let value = BigRational::new(bn.abs(), factorial.clone());
        out.push(value.to_f64().unwrap_or(0.0));
    }
    out
}

fn solve_theta(m: usize, coeffs: &[f64], tolerance: f64) -> f64 {
    // sum_{n > m} |c_n| theta^(n-1), increasing in theta
    let ratio = |theta: f64| -> f64 {
        let mut acc = 0.0;
        let mut power = theta.powi(m as i32);
        for &c in &coeffs[m + 1..] {
            acc += c * power;
            power *= theta;
        }
        acc
    };
    let (mut lo, mut hi) = (0.0f64, 1e-20f64);
    while ratio(hi) <= tolerance {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio(mid) <= tolerance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
