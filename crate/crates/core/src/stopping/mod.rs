//! Stopping-set exponents, critical ratios, their high-rate scaling and
//! exact small-instance counts.

mod bec;
mod enumerate;
mod exhaustive;
mod lm1;
mod multinomial;
mod scaling;

use serde::{Deserialize, Serialize};

pub use bec::{bec_critical_ratio, bec_curve, bec_gamma, bec_scaling_bound};
pub use enumerate::{exact_ss_enumerator, EnumeratorTable};
pub use exhaustive::{exhaustive_stopping_sets, StoppingCounts, MAX_EXHAUSTIVE_N};
pub use lm1::{lm1_beta_star, lm1_curve, lm1_gamma, lm1_w, WPoint};
pub use multinomial::{multinomial_ratio_bounds, MultinomialBounds};
pub use scaling::{lm1_beta_bar, lm1_scaling_d, lm1_scaling_v, lm1_scaling_v_curve, lm1_scaling_v_max};

use crate::error::{Error, Result};
use crate::numeric::ln_pow1p_excess;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingFamily {
    Bec,
    Lm1,
}

impl StoppingFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StoppingFamily::Bec => "bec",
            StoppingFamily::Lm1 => "lm1",
        }
    }
}

impl std::str::FromStr for StoppingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bec" => Ok(Self::Bec),
            "lm1" => Ok(Self::Lm1),
            other => Err(Error::InvalidParams(format!("unknown stopping-set family '{other}'"))),
        }
    }
}

/// One evaluation of an exponent bound at its optimal Chernoff parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    /// Correct-but-unverified fraction (erasure fraction for the BEC).
    pub alpha: f64,
    /// Incorrect fraction; zero for the BEC.
    pub beta: f64,
    pub x0: f64,
    /// Absent for the BEC.
    pub y0: Option<f64>,
    pub gamma: f64,
    /// Largest relative residual of the stationarity equations.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsCurve {
    pub family: StoppingFamily,
    pub j: usize,
    pub k: usize,
    pub points: Vec<ExponentPoint>,
    pub critical_ratio: f64,
    /// `w(beta)` per point (LM1 only).
    pub w_values: Vec<f64>,
}

pub(crate) fn check_jk(j: usize, k: usize) -> Result<()> {
    if j < 3 || k <= j {
        return Err(Error::InvalidParams(format!("need 3 <= j < k, got j={j}, k={k}")));
    }
    Ok(())
}

/// `ln(e^z - 1)` for `z > 0`.
pub(crate) fn ln_expm1(z: f64) -> f64 {
    if z < 30.0 {
        z.exp_m1().ln()
    } else {
        z + (-(-z).exp()).ln_1p()
    }
}

/// `ln((1 + u)^m - 1)` from `ln u`, safe when `u` underflows.
pub(crate) fn ln_pow1p_m1_log(m: f64, ln_u: f64) -> f64 {
    if ln_u > -300.0 {
        ln_expm1(m * ln_u.exp().ln_1p())
    } else {
        m.ln() + ln_u
    }
}

/// `ln((1 + u)^k - 1 - k u)` from `ln u`, safe when `u` underflows.
pub(crate) fn ln_pow1p_excess_log(k: u64, ln_u: f64) -> f64 {
    if ln_u > -300.0 {
        ln_pow1p_excess(k, ln_u.exp())
    } else {
        let kf = k as f64;
        (kf * (kf - 1.0) / 2.0).ln() + 2.0 * ln_u
    }
}

/// `ln(1 + sum e^{t_i})`.
pub(crate) fn ln1p_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m < 700.0 {
        terms.iter().map(|t| t.exp()).sum::<f64>().ln_1p()
    } else {
        let s: f64 = terms.iter().map(|t| (t - m).exp()).sum::<f64>() + (-m).exp();
        m + s.ln()
    }
}
