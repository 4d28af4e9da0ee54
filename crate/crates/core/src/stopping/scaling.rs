use crate::error::{Error, Result};
use crate::numeric::bisect_root;
use crate::thresholds::{ScalingConstants, ScalingFamily};

fn check_j(j: usize) -> Result<f64> {
    if j < 3 {
        return Err(Error::Domain(format!("need j >= 3, got {j}")));
    }
    Ok(j as f64)
}

/// Limiting scaled exponent
/// `v(c, d) = (d/2) ((c-1) j ln(1-c) - 2c ln c + (1+c)(2-j)(1 - ln d))`
/// for `alpha = c beta` and `beta = d (k-1)^(-j/(j-2))`.
pub fn lm1_scaling_v(j: usize, c: f64, d: f64) -> Result<f64> {
    let jf = check_j(j)?;
    if !(c > 0.0 && c < 1.0 && d > 0.0) {
        return Err(Error::Domain(format!("need c in (0, 1) and d > 0, got c={c}, d={d}")));
    }
    Ok(d / 2.0 * ((c - 1.0) * jf * (-c).ln_1p() - 2.0 * c * c.ln() + (1.0 + c) * (2.0 - jf) * (1.0 - d.ln())))
}

/// Stationary point of `v(c, d)` in `c`, written as `d = (1-c)^(-j/(j-2)) c^(2/(j-2))`.
pub fn lm1_scaling_d(j: usize, c: f64) -> Result<f64> {
    let jf = check_j(j)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("c={c} outside (0, 1)")));
    }
    Ok(((-jf / (jf - 2.0)) * (-c).ln_1p() + 2.0 / (jf - 2.0) * c.ln()).exp())
}

/// `(d(c), v(c, d(c)))` along the stationary curve.
pub fn lm1_scaling_v_curve(j: usize, c: f64) -> Result<(f64, f64)> {
    let d = lm1_scaling_d(j, c)?;
    Ok((d, lm1_scaling_v(j, c, d)?))
}

/// `v(d) = max_c v(c, d)`. `v` is concave in `c` and `d(c)` is increasing,
/// so the maximiser is found by inverting `d(c)`.
pub fn lm1_scaling_v_max(j: usize, d: f64) -> Result<f64> {
    check_j(j)?;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("d={d} must be positive")));
    }
    let target = d.ln();
    let c = bisect_root(|c| lm1_scaling_d(j, c).map(|x| x.ln() - target).unwrap_or(f64::NAN), 1e-300, 1.0 - 1e-16, 1e-16);
    lm1_scaling_v(j, c, d)
}

/// Positive root of `v` along the stationary curve. Returns `beta_bar` and
/// the curve parameter `c` at the root as the interior optimum.
pub fn lm1_beta_bar(j: usize) -> Result<ScalingConstants> {
    check_j(j)?;
    let f = |c: f64| lm1_scaling_v_curve(j, c).map(|p| p.1).unwrap_or(f64::NAN);
    let n = 2000;
    let mut prev = 1e-9;
    let mut fprev = f(prev);
    for i in 1..n {
        let c = i as f64 / n as f64;
        let fc = f(c);
        if fprev < 0.0 && fc >= 0.0 {
            let root = bisect_root(f, prev, c, 1e-16);
            let mut out = ScalingConstants::new(ScalingFamily::SsLm1, j);
            out.beta_bar = Some(lm1_scaling_d(j, root)?);
            out.interior_optimum = Some(root);
            return Ok(out);
        }
        prev = c;
        fprev = fc;
    }
    Err(Error::NotFound(format!("no sign change of v along the stationary curve for j={j}")))
}
