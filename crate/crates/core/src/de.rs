//! Scalar density-evolution recursions, their high-rate rescalings and
//! threshold search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{one_minus_pow_one_minus, pow_one_minus, unit_interval_grid};
use crate::thresholds;

/// A trajectory is declared convergent once it drops below this value.
pub const CONVERGED_BELOW: f64 = 1e-12;
pub const MAX_DE_ITERS: usize = 10_000;

/// Edge-perspective degree distribution pair. `lambda[i]` and `rho[i]` are
/// the coefficients of `x^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    lambda: Vec<f64>,
    rho: Vec<f64>,
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        for (name, p) in [("lambda", &lambda), ("rho", &rho)] {
            if p.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} has a negative or non-finite coefficient")));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams(format!("{name}(1) = {total}, expected 1")));
            }
            if p.first().copied().unwrap_or(0.0) != 0.0 {
                return Err(Error::InvalidParams(format!("{name} has a degree-1 edge fraction")));
            }
        }
        Ok(Self { lambda, rho })
    }

    /// `lambda(x) = x^(j-1)`, `rho(x) = x^(k-1)`.
    pub fn regular(j: usize, k: usize) -> Result<Self> {
        if j < 2 || k < 2 {
            return Err(Error::InvalidParams(format!("degrees j={j}, k={k} must be at least 2")));
        }
        let mut lambda = vec![0.0; j];
        lambda[j - 1] = 1.0;
        let mut rho = vec![0.0; k];
        rho[k - 1] = 1.0;
        Ok(Self { lambda, rho })
    }

    pub fn lambda_coeffs(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rho_coeffs(&self) -> &[f64] {
        &self.rho
    }

    pub fn lambda(&self, x: f64) -> f64 {
        eval_poly(&self.lambda, x)
    }

    pub fn lambda_prime(&self, x: f64) -> f64 {
        self.lambda.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64 * x.powi(i as i32 - 1)).sum()
    }

    pub fn rho(&self, x: f64) -> f64 {
        eval_poly(&self.rho, x)
    }

    /// `1 - rho(1 - x)`, accurate for small `x` and large degrees.
    pub fn one_minus_rho_one_minus(&self, x: f64) -> f64 {
        self.rho.iter().enumerate().map(|(i, &c)| if c == 0.0 { 0.0 } else { c * one_minus_pow_one_minus(x, i as f64) }).sum()
    }

    /// Average variable degree `1 / integral_0^1 lambda`.
    pub fn avg_variable_degree(&self) -> f64 {
        1.0 / self.lambda.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64).sum::<f64>()
    }

    /// Average check degree `1 / integral_0^1 rho`.
    pub fn avg_check_degree(&self) -> f64 {
        1.0 / self.rho.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64).sum::<f64>()
    }
}

fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Erasure recursion `delta * lambda(1 - rho(1 - x))`.
pub fn de_bec_step(dd: &DegreeDistribution, delta: f64, x: f64) -> f64 {
    (delta * dd.lambda(dd.one_minus_rho_one_minus(x))).clamp(0.0, 1.0)
}

/// Recursion for the fraction of unverified messages under the
/// zero-residual / single-unknown decoder.
pub fn de_lm1_step(j: usize, k: usize, delta: f64, x: f64) -> f64 {
    let (jm, km) = ((j - 1) as f64, (k - 1) as f64);
    let t = one_minus_pow_one_minus(x, km);
    let z = ((1.0 - delta) * t.powf(jm) + x).clamp(0.0, 1.0);
    (delta * one_minus_pow_one_minus(z, km).powf(jm)).clamp(0.0, 1.0)
}

/// Recursion for the message-based decoder that also verifies on two
/// agreeing implied values.
pub fn de_lm2mb_step(j: usize, k: usize, delta: f64, x: f64) -> f64 {
    let (jm, km) = ((j - 1) as f64, (k - 1) as f64);
    let s = one_minus_pow_one_minus(x, km);
    let lam = s.powf(jm);
    let dlam = jm * s.powf(jm - 1.0);
    let z = ((1.0 - delta) * lam + x).clamp(0.0, 1.0);
    let diff = (pow_one_minus(x, km) - pow_one_minus(z, km)).max(0.0);
    (delta * (lam + dlam * diff)).clamp(0.0, 1.0)
}

/// One of the scalar recursions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Recursion {
    Bec { dd: DegreeDistribution },
    Lm1 { j: usize, k: usize },
    Lm2Mb { j: usize, k: usize },
}

impl Recursion {
    pub fn bec_regular(j: usize, k: usize) -> Result<Self> {
        Ok(Recursion::Bec { dd: DegreeDistribution::regular(j, k)? })
    }

    pub fn lm1(j: usize, k: usize) -> Result<Self> {
        check_jk(j, k, 2)?;
        Ok(Recursion::Lm1 { j, k })
    }

    pub fn lm2mb(j: usize, k: usize) -> Result<Self> {
        check_jk(j, k, 2)?;
        Ok(Recursion::Lm2Mb { j, k })
    }

    pub fn step(&self, delta: f64, x: f64) -> f64 {
        match self {
            Recursion::Bec { dd } => de_bec_step(dd, delta, x),
            Recursion::Lm1 { j, k } => de_lm1_step(*j, *k, delta, x),
            Recursion::Lm2Mb { j, k } => de_lm2mb_step(*j, *k, delta, x),
        }
    }
}

fn check_jk(j: usize, k: usize, jmin: usize) -> Result<()> {
    if j < jmin || k <= j {
        return Err(Error::InvalidParams(format!("need j >= {jmin} and k > j, got j={j}, k={k}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeCurve {
    pub delta: f64,
    /// `x_0 = delta, x_1, ...`; empty unless recording was requested.
    pub trajectory: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub final_x: f64,
}

/// Iterates from `x_0 = delta` until `x < 1e-12` or `10^4` steps.
pub fn run_de(rec: &Recursion, delta: f64, record: bool) -> DeCurve {
    let mut x = delta;
    let mut traj = Vec::new();
    if record {
        traj.push(x);
    }
    let mut it = 0;
    while x >= CONVERGED_BELOW && it < MAX_DE_ITERS {
        x = rec.step(delta, x);
        it += 1;
        if record {
            traj.push(x);
        }
    }
    DeCurve { delta, trajectory: traj, converged: x < CONVERGED_BELOW, iterations: it, final_x: x }
}

pub fn de_converges(rec: &Recursion, delta: f64) -> bool {
    run_de(rec, delta, false).converged
}

/// Bisection for the largest `delta` in `[0, 1]` at which the recursion
/// converges. Returns the midpoint of the final bracket of width `< tol`.
pub fn find_threshold(rec: &Recursion, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    if de_converges(rec, 1.0) {
        return Err(Error::NonBracketing { always_converges: true });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let probe = (tol * 0.5).min(1e-9);
    if !de_converges(rec, probe) {
        return Err(Error::NonBracketing { always_converges: false });
    }
    lo = f64::max(lo, probe);
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if de_converges(rec, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_scaled_args(alpha: f64, alpha_bar: f64, x: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha_bar > 0.0) {
        return Err(Error::Domain(format!("need alpha > 0 and alpha_bar > 0, got {alpha}, {alpha_bar}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x={x} outside [0, 1]")));
    }
    Ok(())
}

fn check_lm1_scaled(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    check_scaled_args(alpha, alpha_bar, x)?;
    if j < 2 || k < 2 {
        return Err(Error::Domain(format!("need j >= 2 and k >= 2, got j={j}, k={k}")));
    }
    let kk = (k - 1) as f64;
    if kk <= alpha_bar.powi(j as i32 - 1) {
        return Err(Error::Domain(format!("k-1={kk} must exceed alpha_bar^(j-1)")));
    }
    if alpha > alpha_bar {
        return Err(Error::Domain(format!("alpha={alpha} exceeds alpha_bar={alpha_bar}")));
    }
    Ok(kk)
}

/// The zero-residual recursion rescaled by `delta = alpha (k-1)^(-j/(j-1))`
/// and `x = alpha_bar * y * (k-1)^(-j/(j-1))`, divided by the same factor.
pub fn scaled_lm1_g(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    let kk = check_lm1_scaled(j, k, alpha, alpha_bar, x)?;
    let jm = (j - 1) as f64;
    let scale = kk.powf(j as f64 / jm);
    let u = alpha_bar * x / scale;
    let t = one_minus_pow_one_minus(u, kk).powf(jm);
    let z = ((1.0 - alpha / scale) * t + u).clamp(0.0, 1.0);
    Ok(alpha / alpha_bar * one_minus_pow_one_minus(z, kk).powf(jm))
}

/// Upper envelope of [`scaled_lm1_g`].
pub fn scaled_lm1_gbar(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    let kk = check_lm1_scaled(j, k, alpha, alpha_bar, x)?;
    let jm = (j - 1) as f64;
    let z = (alpha_bar * x).powf(jm) / kk + alpha_bar * x / kk.powf(j as f64 / jm);
    Ok(alpha / alpha_bar * one_minus_pow_one_minus(z.min(1.0), kk).powf(jm))
}

/// Large-k limit of [`scaled_lm1_g`] and [`scaled_lm1_gbar`].
pub fn scaled_lm1_gstar(j: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    check_scaled_args(alpha, alpha_bar, x)?;
    let jm = (j - 1) as f64;
    Ok(alpha / alpha_bar * (-(-(alpha_bar * x).powf(jm)).exp_m1()).powf(jm))
}

fn check_lm2_scaled(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    check_scaled_args(alpha, alpha_bar, x)?;
    if j < 3 {
        return Err(Error::Domain(format!("need j >= 3, got {j}")));
    }
    let kf = k as f64;
    if kf <= alpha * j as f64 {
        return Err(Error::Domain(format!("k={k} must exceed alpha*j={}", alpha * j as f64)));
    }
    Ok(kf)
}

/// Rescaled message-based recursion with `s(x) = 1 - (1 - alpha j x / k)^(k-1)`.
pub fn scaled_lm2mb_g(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    let kf = check_lm2_scaled(j, k, alpha, alpha_bar, x)?;
    let jf = j as f64;
    let u = alpha * jf * x / kf;
    let s = one_minus_pow_one_minus(u, kf - 1.0);
    let ratio = (1.0 - alpha * jf / kf) / (1.0 - u);
    let inner = (ratio * s.powf(jf - 1.0)).clamp(0.0, 1.0);
    let tail = one_minus_pow_one_minus(inner, kf - 1.0);
    Ok(alpha / alpha_bar * (s.powf(jf - 1.0) + (jf - 1.0) * s.powf(jf - 2.0) * pow_one_minus(u, kf - 1.0) * tail))
}

/// Upper envelope of [`scaled_lm2mb_g`].
pub fn scaled_lm2mb_gbar(j: usize, k: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    let kf = check_lm2_scaled(j, k, alpha, alpha_bar, x)?;
    let jf = j as f64;
    let u = alpha * jf * x / kf;
    let p = pow_one_minus(u, kf);
    let q = one_minus_pow_one_minus(u, kf);
    Ok(alpha / alpha_bar * (q.powf(jf - 1.0) + (jf - 1.0) * q.powf(jf - 2.0) * p))
}

/// Large-k limit of the message-based envelopes.
pub fn scaled_lm2mb_gstar(j: usize, alpha: f64, alpha_bar: f64, x: f64) -> Result<f64> {
    check_scaled_args(alpha, alpha_bar, x)?;
    if j < 3 {
        return Err(Error::Domain(format!("need j >= 3, got {j}")));
    }
    let jf = j as f64;
    let e = (-alpha * jf * x).exp();
    Ok(alpha / alpha_bar * (-(-alpha * jf * x).exp_m1()).powf(jf - 2.0) * (1.0 + (jf - 2.0) * e))
}

/// Rescaled erasure recursion `(alpha/alpha_bar) (1 - (1 - alpha_bar j y/(k-1))^(k-1))^(j-1)`.
pub fn scaled_bec_f(j: usize, k: usize, alpha: f64, alpha_bar: f64, y: f64) -> Result<f64> {
    check_scaled_args(alpha, alpha_bar, y)?;
    let kk = (k - 1) as f64;
    let u = alpha_bar * j as f64 * y / kk;
    if u > 1.0 {
        return Err(Error::Domain(format!("alpha_bar*j*y/(k-1) = {u} exceeds 1")));
    }
    Ok(alpha / alpha_bar * one_minus_pow_one_minus(u, kk).powi(j as i32 - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bec,
    Lm1,
    Lm2Mb,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bec => "bec",
            Family::Lm1 => "lm1",
            Family::Lm2Mb => "lm2mb",
        }
    }

    /// The (j,k)-regular recursion of this family.
    pub fn recursion(&self, j: usize, k: usize) -> Result<Recursion> {
        match self {
            Family::Bec => Recursion::bec_regular(j, k),
            Family::Lm1 => Recursion::lm1(j, k),
            Family::Lm2Mb => Recursion::lm2mb(j, k),
        }
    }

    /// Large-k threshold: `abar j/(k-1)`, `abar (k-1)^(-j/(j-1))` or
    /// `abar j/k`.
    pub fn scaling_law(&self, j: usize, k: usize) -> Result<f64> {
        let (jf, kf) = (j as f64, k as f64);
        Ok(match self {
            Family::Bec => crate::thresholds::alpha_bar_bec(j)?.value() * jf / (kf - 1.0),
            Family::Lm1 => crate::thresholds::alpha_bar_lm1(j)?.value() * (kf - 1.0).powf(-jf / (jf - 1.0)),
            Family::Lm2Mb => crate::thresholds::alpha_bar_lm2mb(j)?.value() * jf / kf,
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bec" => Ok(Family::Bec),
            "lm1" => Ok(Family::Lm1),
            "lm2mb" | "lm2-mb" => Ok(Family::Lm2Mb),
            other => Err(Error::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

const MAX_K: usize = 1_000_000;

/// Smallest check degree `k` for which the family's upper envelope lies
/// strictly below the identity on the evaluation grid. The envelopes are
/// decreasing in `k`, so the search doubles and then bisects.
#[allow(non_snake_case)]
pub fn find_K(family: Family, j: usize, alpha: f64) -> Result<usize> {
    let alpha_bar = match family {
        Family::Bec => thresholds::alpha_bar_bec(j)?.value(),
        Family::Lm1 => thresholds::alpha_bar_lm1(j)?.value(),
        Family::Lm2Mb => thresholds::alpha_bar_lm2mb(j)?.value(),
    };
    if !(alpha > 0.0 && alpha < alpha_bar) {
        return Err(Error::InvalidParams(format!("alpha={alpha} must lie in (0, {alpha_bar})")));
    }
    let jf = j as f64;
    let k_min = match family {
        Family::Bec => (j + 1).max((alpha_bar * jf).ceil() as usize + 1),
        Family::Lm1 => (j + 1).max(alpha_bar.powi(j as i32 - 1).floor() as usize + 2),
        Family::Lm2Mb => (j + 1).max((alpha * jf).floor() as usize + 1),
    };
    let grid = unit_interval_grid();
    let below = |k: usize| -> bool {
        grid.iter().all(|&y| {
            let g = match family {
                Family::Bec => scaled_bec_f(j, k, alpha, alpha_bar, y),
                Family::Lm1 => scaled_lm1_gbar(j, k, alpha, alpha_bar, y),
                Family::Lm2Mb => scaled_lm2mb_gbar(j, k, alpha, alpha_bar, y),
            };
            matches!(g, Ok(v) if v < y)
        })
    };
    let mut k = k_min;
    let mut prev = k_min - 1;
    while !below(k) {
        if k >= MAX_K {
            return Err(Error::NotFound(format!("no k <= {MAX_K} satisfies the envelope condition")));
        }
        prev = k;
        k = if k < k_min + 64 { k + 1 } else { (2 * k).min(MAX_K) };
    }
    let (mut lo, mut hi) = (prev, k);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_vanish_at_zero() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(de_bec_step(&dd, 0.4, 0.0), 0.0);
        assert_eq!(de_bec_step(&dd, 0.0, 0.3), 0.0);
        assert_eq!(de_lm1_step(3, 6, 0.2, 0.0), 0.0);
        assert_eq!(de_lm1_step(3, 6, 0.0, 0.2), 0.0);
        assert_eq!(de_lm2mb_step(3, 6, 0.2, 0.0), 0.0);
    }

    #[test]
    fn degree_distribution_validation() {
        assert!(DegreeDistribution::new(vec![0.0, 0.5, 0.6], vec![0.0, 1.0]).is_err());
        assert!(DegreeDistribution::new(vec![0.0, 0.5, 0.5], vec![0.0, 0.0, 1.0]).is_ok());
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        assert!((dd.avg_variable_degree() - 3.0).abs() < 1e-12);
        assert!((dd.avg_check_degree() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn non_bracketing_is_reported() {
        let rec = Recursion::bec_regular(3, 6).unwrap();
        assert!(find_threshold(&rec, 0.0).is_err());
    }
}
