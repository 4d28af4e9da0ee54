//! High-rate threshold constants, the lower real branch of the Lambert W
//! function, oversampling ratios and the information-theoretic length bound.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::de::DegreeDistribution;
use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, golden_section_min, log_space, unit_interval_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingFamily {
    Bec,
    Lm1,
    Lm2Mb,
    SsBec,
    SsLm1,
}

impl ScalingFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingFamily::Bec => "bec",
            ScalingFamily::Lm1 => "lm1",
            ScalingFamily::Lm2Mb => "lm2mb",
            ScalingFamily::SsBec => "ss-bec",
            ScalingFamily::SsLm1 => "ss-lm1",
        }
    }
}

impl std::str::FromStr for ScalingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bec" => Ok(Self::Bec),
            "lm1" => Ok(Self::Lm1),
            "lm2mb" | "lm2-mb" => Ok(Self::Lm2Mb),
            "ss-bec" => Ok(Self::SsBec),
            "ss-lm1" => Ok(Self::SsLm1),
            other => Err(Error::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

/// Per-family scaling constants for variable degree `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub family: ScalingFamily,
    pub j: usize,
    pub alpha_bar: Option<f64>,
    pub beta_bar: Option<f64>,
    /// Minimiser of the defining ratio (`y*` for erasures, `x*` for the
    /// zero-residual decoder, the curve parameter `c` for stopping sets).
    /// `None` when the optimum is a boundary limit.
    pub interior_optimum: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub gamma0: Option<f64>,
    pub theta: Option<f64>,
}

impl ScalingConstants {
    pub(crate) fn new(family: ScalingFamily, j: usize) -> Self {
        Self { family, j, alpha_bar: None, beta_bar: None, interior_optimum: None, k: None, gamma0: None, theta: None }
    }

    /// The family's headline constant (`alpha_bar` or `beta_bar`).
    pub fn value(&self) -> f64 {
        self.alpha_bar.or(self.beta_bar).unwrap_or(f64::NAN)
    }
}

/// Lower real branch `W_{-1}(z)` for `z` in `[-1/e, 0)`.
pub fn lambert_w_minus1(z: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if !(z >= branch - 1e-17 && z < 0.0) {
        return Err(Error::Domain(format!("W_-1 needs z in [-1/e, 0), got {z}")));
    }
    let q = 1.0 + std::f64::consts::E * z;
    if q <= 1e-300 {
        return Ok(-1.0);
    }
    let mut w = if z < -0.25 {
        let p = -(2.0 * q).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 1e-16 * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

/// Erasure-channel constant for `lambda(x) = x^(j-1)`:
/// `alpha_bar = (y*/j)(1 - e^(-y*))^(1-j)` with `e^(y*) = (j-1) y* + 1`.
pub fn alpha_bar_bec(j: usize) -> Result<ScalingConstants> {
    if j < 2 {
        return Err(Error::Domain(format!("need j >= 2, got {j}")));
    }
    let mut out = ScalingConstants::new(ScalingFamily::Bec, j);
    if j == 2 {
        out.alpha_bar = Some(0.5);
        out.gamma0 = Some(2.0);
        return Ok(out);
    }
    let jm = (j - 1) as f64;
    let w = lambert_w_minus1(-(-1.0 / jm).exp() / jm)?;
    let y = -(1.0 + jm * w) / jm;
    let a = y / j as f64 * (-(-y).exp_m1()).powf(1.0 - j as f64);
    out.alpha_bar = Some(a);
    out.interior_optimum = Some(y);
    out.gamma0 = Some(1.0 / a);
    Ok(out)
}

/// Erasure-channel constant for a general variable-side degree
/// distribution: `inf_y y / (j lambda(1 - e^(-y)))` with `j` the average
/// variable degree, minimised numerically.
pub fn alpha_bar_bec_general(dd: &DegreeDistribution) -> Result<ScalingConstants> {
    let j = dd.avg_variable_degree();
    let ratio = |y: f64| {
        let l = dd.lambda(-(-y).exp_m1());
        if l > 0.0 {
            y / (j * l)
        } else {
            f64::INFINITY
        }
    };
    let grid = log_space(1e-9, 200.0, 4000);
    let (mut bi, mut bv) = (0, f64::INFINITY);
    for (i, &y) in grid.iter().enumerate() {
        let v = ratio(y);
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    let lo = grid[bi.saturating_sub(1)];
    let hi = grid[(bi + 1).min(grid.len() - 1)];
    let (y, v) = golden_section_min(ratio, lo, hi, 1e-14);
    let (y, v) = if v < bv { (y, v) } else { (grid[bi], bv) };
    let mut out = ScalingConstants::new(ScalingFamily::Bec, j.round() as usize);
    out.alpha_bar = Some(v);
    out.interior_optimum = if bi == 0 { None } else { Some(y) };
    out.gamma0 = Some(1.0 / v);
    Ok(out)
}

/// `h_j(x) = (-ln(1 - x^(1/(j-1))) x^(1-j))^(1/(j-1))`, whose infimum over
/// `(0, 1]` is the zero-residual decoder's constant.
pub fn lm1_h(j: usize, x: f64) -> f64 {
    let jm = (j - 1) as f64;
    let one_minus_root = -(x.ln() / jm).exp_m1();
    (-(one_minus_root.ln()) * x.powf(-jm)).powf(1.0 / jm)
}

/// Zero-residual decoder constant via the closed-form minimiser
/// `x* = (1 + 1/((j-1)^2 W_{-1}(-e^{-1/(j-1)^2}/(j-1)^2)))^2`.
pub fn alpha_bar_lm1(j: usize) -> Result<ScalingConstants> {
    if j < 2 {
        return Err(Error::Domain(format!("need j >= 2, got {j}")));
    }
    let mut out = ScalingConstants::new(ScalingFamily::Lm1, j);
    if j == 2 {
        out.alpha_bar = Some(1.0);
        return Ok(out);
    }
    let (v, _) = alpha_bar_lm1_numeric(j)?;
    out.alpha_bar = Some(v);
    out.interior_optimum = Some(lm1_interior_optimum(j)?);
    Ok(out)
}

/// Closed-form minimiser of [`lm1_h`] for `j >= 3`.
pub fn lm1_interior_optimum(j: usize) -> Result<f64> {
    if j < 3 {
        return Err(Error::Domain(format!("interior optimum needs j >= 3, got {j}")));
    }
    let s = ((j - 1) * (j - 1)) as f64;
    let w = lambert_w_minus1(-(-1.0 / s).exp() / s)?;
    Ok((1.0 + 1.0 / (s * w)).powi(2))
}

/// Direct golden-section minimisation of [`lm1_h`] on `[1e-12, 1 - 1e-12]`.
pub fn alpha_bar_lm1_numeric(j: usize) -> Result<(f64, f64)> {
    if j < 3 {
        return Err(Error::Domain(format!("need j >= 3, got {j}")));
    }
    let (x, v) = golden_section_min(|x| lm1_h(j, x), 1e-12, 1.0 - 1e-12, 1e-15);
    Ok((v, x))
}

/// `phi_j(u) = (1 - e^-u)^(j-2) (1 + (j-2) e^-u)`.
pub fn lm2mb_phi(j: usize, u: f64) -> f64 {
    let jm2 = (j - 2) as f64;
    (-(-u).exp_m1()).powf(jm2) * (1.0 + jm2 * (-u).exp())
}

/// `max_x phi_j(alpha j x) - x` over the evaluation grid with golden-section
/// refinement around the best grid point.
pub fn lm2mb_excess(j: usize, alpha: f64) -> (f64, f64) {
    let f = |x: f64| lm2mb_phi(j, alpha * j as f64 * x) - x;
    let grid = unit_interval_grid();
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > bv {
            bi = i;
            bv = v;
        }
    }
    let lo = if bi == 0 { 0.0 } else { grid[bi - 1] };
    let hi = grid[(bi + 1).min(grid.len() - 1)];
    let (x, v) = golden_section_max(f, lo.max(1e-300), hi, 1e-13);
    if v > bv {
        (x, v)
    } else {
        (grid[bi], bv)
    }
}

/// Message-based decoder constant: the largest `alpha` with
/// `phi_j(alpha j x) <= x` on `(0, 1]`, by bisection on `alpha`.
pub fn alpha_bar_lm2mb(j: usize) -> Result<ScalingConstants> {
    if j < 3 {
        return Err(Error::Domain(format!("the message-based constant needs j >= 3, got {j}")));
    }
    let feasible = |a: f64| lm2mb_excess(j, a).1 <= 0.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let mut out = ScalingConstants::new(ScalingFamily::Lm2Mb, j);
    out.alpha_bar = Some(a);
    let (x, _) = lm2mb_excess(j, hi);
    out.interior_optimum = if x > 1e-6 { Some(x) } else { None };
    out.gamma0 = Some(1.0 / a);
    Ok(out)
}

/// Defining inequality of each family evaluated at `(alpha, x)`: returns
/// `lhs - x`, which must be non-positive on `(0, 1]` for `alpha <= alpha_bar`.
pub fn defining_gap(family: ScalingFamily, j: usize, alpha: f64, x: f64) -> Result<f64> {
    let jf = j as f64;
    let lhs = match family {
        ScalingFamily::Bec => (-(-alpha * jf * x).exp_m1()).powf(jf - 1.0),
        ScalingFamily::Lm1 => (-(-(alpha * x).powf(jf - 1.0)).exp_m1()).powf(jf - 1.0),
        ScalingFamily::Lm2Mb => lm2mb_phi(j, alpha * jf * x),
        other => return Err(Error::Domain(format!("no defining inequality for {}", other.name()))),
    };
    Ok(lhs - x)
}

/// Minimal oversampling ratio `m / (n delta)`.
///
/// * `lm1`: `alpha_bar^(-(j-1)/j) delta^(-1/j) j`
/// * `lm2mb`: `1 / alpha_bar`
/// * `ss-lm1`: `beta_bar^(-(j-2)/j) j delta^(-2/j)`
pub fn oversampling_gamma0(family: ScalingFamily, j: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta={delta} outside (0, 1)")));
    }
    let jf = j as f64;
    match family {
        ScalingFamily::Lm1 => {
            let a = alpha_bar_lm1(j)?.value();
            Ok(a.powf(-(jf - 1.0) / jf) * delta.powf(-1.0 / jf) * jf)
        }
        ScalingFamily::Lm2Mb => Ok(1.0 / alpha_bar_lm2mb(j)?.value()),
        ScalingFamily::SsLm1 => {
            let b = crate::stopping::lm1_beta_bar(j)?.value();
            Ok(b.powf(-(jf - 2.0) / jf) * jf * delta.powf(-2.0 / jf))
        }
        other => Err(Error::Domain(format!("no oversampling formula for {}", other.name()))),
    }
}

/// Zero-residual oversampling with the degree choice `j = ceil(ln(1/delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDegreeChoice {
    pub j: usize,
    pub gamma0: f64,
    /// `ln ceil(ln(1/delta)) + 1`, an upper bound on `ln gamma0`.
    pub ln_bound: f64,
}

pub fn lm1_log_degree_oversampling(delta: f64) -> Result<LogDegreeChoice> {
    if !(delta > 0.0 && delta < (-2.0f64).exp()) {
        return Err(Error::Domain(format!("delta={delta} must lie in (0, e^-2) so that j >= 2")));
    }
    let j = (1.0 / delta).ln().ceil() as usize;
    let gamma0 = oversampling_gamma0(ScalingFamily::Lm1, j, delta)?;
    Ok(LogDegreeChoice { j, gamma0, ln_bound: (j as f64).ln() + 1.0 })
}

/// Largest length for which measurements can carry the signal's entropy:
/// `exp((H(Z) (j-1) + ln lambda) / omega)`.
pub fn info_bound_max_n(hz: f64, j: usize, lambda_poisson: f64, omega: f64) -> Result<f64> {
    if !(hz >= 0.0 && hz.is_finite()) {
        return Err(Error::Domain(format!("entropy {hz} must be finite and non-negative")));
    }
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::Domain(format!("omega={omega} outside (0, 1)")));
    }
    if !(lambda_poisson > 0.0) {
        return Err(Error::Domain(format!("lambda={lambda_poisson} must be positive")));
    }
    Ok(((hz * (j as f64 - 1.0) + lambda_poisson.ln()) / omega).exp())
}

/// Chernoff bound `e^-lambda (x0/lambda)^-x0 e^x0` on `P(X >= x0)` for
/// `X ~ Poisson(lambda)`.
pub fn poisson_tail_bound(lambda: f64, x0: f64) -> Result<f64> {
    check_poisson(lambda, x0)?;
    Ok((-lambda - x0 * (x0 / lambda).ln() + x0).exp())
}

/// Exact `P(X >= x0)` by summing the pmf from `ceil(x0)` upward.
pub fn poisson_tail_exact(lambda: f64, x0: f64) -> Result<f64> {
    check_poisson(lambda, x0)?;
    let i0 = x0.ceil().max(0.0);
    let log_t0 = -lambda + i0 * lambda.ln() - ln_gamma(i0 + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut i = i0;
    loop {
        i += 1.0;
        term *= lambda / i;
        sum += term;
        if term < 1e-18 * sum && i > lambda {
            break;
        }
    }
    Ok((log_t0 + sum.ln()).exp().min(1.0))
}

fn check_poisson(lambda: f64, x0: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda={lambda} must be positive")));
    }
    if !(x0 >= lambda && x0.is_finite()) {
        return Err(Error::Domain(format!("x0={x0} must be at least lambda={lambda}")));
    }
    Ok(())
}
