use crate::sparse::SparseMatrix;

/// Number of cached powers: `||A^n||_1` for `n = 1..=NORM_SERIES_LEN`.
pub const NORM_SERIES_LEN: usize = 9;

/// Stop forming explicit powers once a product would exceed this many entries.
const POWER_NNZ_BUDGET: usize = 4_000_000;

/// `||A^n||_1` for `n = 1..=9`.
///
/// Powers are formed exactly while they stay sparse enough; past the budget
/// the remaining entries are filled with the submultiplicative bound
/// `min_{a+b=n} ||A^a|| ||A^b||`, which is always a valid upper bound.
#[allow(clippy::needless_range_loop)]
pub fn one_norm_series(a: &SparseMatrix) -> Vec<f64> {
    let mut norms = vec![0.0; NORM_SERIES_LEN + 1];
    norms[0] = 1.0;
    norms[1] = a.one_norm();
    let mut power = a.clone();
    let mut exact_up_to = 1;
    for n in 2..=NORM_SERIES_LEN {
        let estimate = power.nnz().saturating_mul(a.nnz()) / a.n_rows().max(1);
        if estimate > POWER_NNZ_BUDGET {
            break;
        }
        power = a.matmul(&power).expect("square");
        norms[n] = power.one_norm();
        exact_up_to = n;
    }
    for n in exact_up_to + 1..=NORM_SERIES_LEN {
        norms[n] = (1..n).map(|k| norms[k] * norms[n - k]).fold(f64::INFINITY, f64::min);
    }
    norms.remove(0);
    norms
}
