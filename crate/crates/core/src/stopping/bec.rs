use super::{check_jk, ln1p_sum_exp, ln_expm1, ExponentPoint, SsCurve, StoppingFamily};
use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, ln_pow1p_excess, log_space};

/// `ln F(x)` with `F(x) = (1+x)^k - k x`, the normalised slope
/// `a = x F'(x) / (k F)` and `da/ds` where `x = e^s`.
pub(crate) fn bec_terms(k: usize, s: f64) -> (f64, f64, f64) {
    let x = s.exp();
    let kf = k as f64;
    let ln_f = ln1p_sum_exp(&[ln_pow1p_excess(k as u64, x)]);
    let l1 = x.ln_1p();
    let a = (s + ln_expm1((kf - 1.0) * l1) - ln_f).exp();
    let second = (2.0 * s + (kf - 1.0).ln() + (kf - 2.0) * l1 - ln_f).exp();
    (ln_f, a, a + second - kf * a * a)
}

/// Solves `a(s) = target` for the increasing map `a`.
pub(crate) fn solve_bec_saddle(k: usize, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    let mut s = 0.5 * (target / (k as f64 - 1.0)).ln();
    if !s.is_finite() || s <= lo || s >= hi {
        s = 0.0;
    }
    for _ in 0..400 {
        let (_, a, da) = bec_terms(k, s);
        let r = a - target;
        if r.abs() <= 1e-14 * target {
            return Ok(s);
        }
        if r > 0.0 {
            hi = hi.min(s);
        } else {
            lo = lo.max(s);
        }
        let newton = s - r / da;
        s = if da > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 {
            return Ok(s);
        }
    }
    Err(Error::NonConvergence(format!("erasure saddle for a={target} stuck in [{lo}, {hi}]")))
}

/// Erasure stopping-set exponent `(j/k) ln(((1+x)^k - k x) / x^(k alpha)) - (j-1) h(alpha)`
/// at the optimal `x`.
pub fn bec_gamma(j: usize, k: usize, alpha: f64) -> Result<ExponentPoint> {
    check_jk(j, k)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let s = solve_bec_saddle(k, alpha)?;
    let (ln_f, a, _) = bec_terms(k, s);
    let (jf, kf) = (j as f64, k as f64);
    let gamma = jf / kf * (ln_f - kf * alpha * s) - (jf - 1.0) * binary_entropy(alpha);
    Ok(ExponentPoint { alpha, beta: 0.0, x0: s.exp(), y0: None, gamma, residual: ((a - alpha) / alpha).abs() })
}

/// Smallest erasure fraction at which the exponent becomes non-negative.
pub fn bec_critical_ratio(j: usize, k: usize) -> Result<f64> {
    check_jk(j, k)?;
    let grid = log_space(1e-18, 0.999, 600);
    let mut prev = grid[0];
    if bec_gamma(j, k, prev)?.gamma >= 0.0 {
        return Err(Error::NotFound(format!("exponent already non-negative at alpha={prev}")));
    }
    for &a in &grid[1..] {
        if bec_gamma(j, k, a)?.gamma >= 0.0 {
            let (mut lo, mut hi) = (prev, a);
            while hi - lo > 1e-13 * hi {
                let mid = 0.5 * (lo + hi);
                if bec_gamma(j, k, mid)?.gamma >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = a;
    }
    Err(Error::NotFound("exponent never becomes non-negative".into()))
}

/// `e (k-1)^(-j/(j-2))`, the large-k form of the erasure critical ratio.
pub fn bec_scaling_bound(j: usize, k: usize) -> f64 {
    let jf = j as f64;
    ((jf - 2.0 - jf * ((k - 1) as f64).ln()) / (jf - 2.0)).exp()
}

pub fn bec_curve(j: usize, k: usize, alphas: &[f64]) -> Result<SsCurve> {
    let points = alphas.iter().map(|&a| bec_gamma(j, k, a)).collect::<Result<Vec<_>>>()?;
    Ok(SsCurve { family: StoppingFamily::Bec, j, k, points, critical_ratio: bec_critical_ratio(j, k)?, w_values: Vec::new() })
}
