use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::TannerGraph;
use crate::signal::SignalVector;

/// Largest graph the exhaustive oracle accepts.
pub const MAX_ORACLE_N: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub signal: SignalVector,
    /// Another support of the same size also fits, or the minimal fit is not
    /// determined by its support.
    pub non_unique: bool,
}

/// Searches supports of increasing size up to `max_support` and returns the
/// least-support vector `x` with `max|Phi x - y| <= 1e-9 * max(1, max|y|)`.
pub fn brute_force_reconstruct(graph: &TannerGraph, y: &[f64], max_support: usize) -> Result<Option<OracleSolution>> {
    let (n, m) = (graph.n(), graph.m());
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge(format!("exhaustive reconstruction needs n <= {MAX_ORACLE_N}, got {n}")));
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if max_support > n {
        return Err(Error::InvalidParams(format!("max_support={max_support} exceeds n={n}")));
    }
    let phi = graph.to_dense();
    let yv = DVector::from_column_slice(y);
    let tol = 1e-9 * y.iter().fold(1.0f64, |a, &b| a.max(b.abs()));

    if y.iter().all(|&v| v.abs() <= tol) {
        return Ok(Some(OracleSolution { signal: SignalVector::zeros(n), non_unique: false }));
    }
    for s in 1..=max_support {
        let mut found: Option<Vec<f64>> = None;
        let mut non_unique = false;
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let sub = DMatrix::from_fn(m, s, |r, c| phi[(r, idx[c])]);
            let svd = sub.clone().svd(true, true);
            if let Ok(sol) = svd.solve(&yv, 1e-12) {
                let resid = (&sub * &sol - &yv).amax();
                if resid <= tol {
                    let smin = svd.singular_values.min();
                    let smax = svd.singular_values.max();
                    if smin <= 1e-10 * smax.max(1.0) {
                        non_unique = true;
                    }
                    if found.is_some() {
                        non_unique = true;
                    } else {
                        let mut x = vec![0.0; n];
                        idx.iter().zip(sol.iter()).for_each(|(&i, &v)| x[i] = v);
                        found = Some(x);
                    }
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        if let Some(x) = found {
            return Ok(Some(OracleSolution { signal: SignalVector::from_values(x), non_unique }));
        }
    }
    Ok(None)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if idx[i] < n - s + i {
            idx[i] += 1;
            for t in i + 1..s {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::next_combination;

    #[test]
    fn combinations_cover_binomial() {
        let mut idx = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut idx, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
    }
}
