use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::ternary_entropy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultinomialBounds {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub ln_lower: f64,
    pub ln_exact: f64,
    pub ln_upper: f64,
}

impl MultinomialBounds {
    pub fn brackets(&self) -> bool {
        self.ln_lower <= self.ln_exact && self.ln_exact <= self.ln_upper
    }
}

fn ln_multinomial(n: f64, parts: &[f64]) -> f64 {
    ln_gamma(n + 1.0) - parts.iter().map(|&p| ln_gamma(p + 1.0)).sum::<f64>()
}

/// Ratio `D = multinomial(n; a, b, n-a-b) / multinomial(nj; aj, bj, (n-a-b)j)`
/// and the Stirling-type bracket
/// `j^(d/2) exp((1-j) n h(a/n, b/n) - 1/(12n)) <= D <= j^(d/2) exp((1-j) n h + 1/(12jn))`,
/// where `d` counts the non-degenerate binomial factors of `D` (`0 < a+b < n`
/// and `0 < a < a+b`). For `0 < a`, `0 < b`, `a + b < n` the prefactor is `j`.
pub fn multinomial_ratio_bounds(n: usize, a: usize, b: usize, j: usize) -> Result<MultinomialBounds> {
    if j < 2 {
        return Err(Error::Domain(format!("need j >= 2, got {j}")));
    }
    if n == 0 || a + b > n {
        return Err(Error::Domain(format!("need a + b <= n and n > 0, got n={n}, a={a}, b={b}")));
    }
    let (nf, af, bf, jf) = (n as f64, a as f64, b as f64, j as f64);
    let rest = nf - af - bf;
    let ln_exact = ln_multinomial(nf, &[af, bf, rest]) - ln_multinomial(nf * jf, &[af * jf, bf * jf, rest * jf]);
    let d = usize::from(a + b > 0 && a + b < n) + usize::from(a > 0 && b > 0);
    let base = d as f64 / 2.0 * jf.ln() + (1.0 - jf) * nf * ternary_entropy(af / nf, bf / nf);
    let ln_lower = base - 1.0 / (12.0 * nf);
    let ln_upper = base + 1.0 / (12.0 * jf * nf);
    Ok(MultinomialBounds {
        lower: ln_lower.exp(),
        exact: ln_exact.exp(),
        upper: ln_upper.exp(),
        ln_lower,
        ln_exact,
        ln_upper,
    })
}
