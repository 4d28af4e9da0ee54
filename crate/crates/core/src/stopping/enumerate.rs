use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_N: usize = 120;

/// Exact stopping-set pattern counts for the (j,k)-regular socket ensemble.
///
/// `S(a, b)` is the coefficient of `x^(ja) y^(jb)` in `g(x,y)^(nj/k)` where
/// `g(x,y) = (1+x+y)^k - k y - ((1+x)^k - 1)` enumerates the edge patterns
/// of one check that block progress.
#[derive(Debug, Clone)]
pub struct EnumeratorTable {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub a_max: usize,
    pub b_max: usize,
    counts: Vec<Vec<BigUint>>,
}

impl EnumeratorTable {
    pub fn s(&self, a: usize, b: usize) -> &BigUint {
        &self.counts[a][b]
    }

    /// Natural log of the ensemble-average number of stopping sets with `a`
    /// correct and `b` incorrect unverified variables (`-inf` if zero).
    pub fn ln_ensemble_average(&self, a: usize, b: usize) -> f64 {
        let s = &self.counts[a][b];
        if s.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (n, j) = (self.n, self.j);
        ln_multinomial(n, &[a, b, n - a - b]) + big_ln(s) - ln_multinomial(n * j, &[a * j, b * j, (n - a - b) * j])
    }

    pub fn ensemble_average(&self, a: usize, b: usize) -> f64 {
        self.ln_ensemble_average(a, b).exp()
    }
}

fn ln_multinomial(n: usize, parts: &[usize]) -> f64 {
    big_ln(&multinomial(n, parts))
}

fn multinomial(n: usize, parts: &[usize]) -> BigUint {
    let mut out = BigUint::one();
    let mut remaining = n;
    for &p in parts {
        out *= binomial(remaining, p);
        remaining -= p;
    }
    out
}

fn binomial(n: usize, r: usize) -> BigUint {
    let r = r.min(n - r);
    let mut out = BigUint::one();
    for i in 0..r {
        out *= BigUint::from(n - i);
        out /= BigUint::from(i + 1);
    }
    out
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map(f64::ln).unwrap_or(f64::NAN)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Builds the table of `S(a, b)` for `a <= a_max`, `b <= b_max` with exact
/// integer arithmetic, truncating all intermediate powers to the degrees
/// needed.
pub fn exact_ss_enumerator(n: usize, j: usize, k: usize, a_max: usize, b_max: usize) -> Result<EnumeratorTable> {
    if j < 2 || k <= j || n == 0 || (n * j) % k != 0 {
        return Err(Error::InvalidParams(format!("need 2 <= j < k and k | n*j, got n={n}, j={j}, k={k}")));
    }
    if n > MAX_N {
        return Err(Error::TooLarge(format!("exact enumeration is limited to n <= {MAX_N}, got {n}")));
    }
    if a_max + b_max > n {
        return Err(Error::InvalidParams(format!("a_max + b_max = {} exceeds n = {n}", a_max + b_max)));
    }
    let (dx, dy) = (j * a_max, j * b_max);
    let mut g: Vec<(usize, usize, BigUint)> = Vec::new();
    for p in 0..=k.min(dx) {
        for q in 0..=(k - p).min(dy) {
            let mut c = multinomial(k, &[p, q, k - p - q]);
            if q == 1 && p == 0 {
                c -= BigUint::from(k);
            }
            if q == 0 && p >= 1 {
                c = BigUint::zero();
            }
            if !c.is_zero() {
                g.push((p, q, c));
            }
        }
    }
    let mut acc = vec![vec![BigUint::zero(); dy + 1]; dx + 1];
    acc[0][0] = BigUint::one();
    for _ in 0..n * j / k {
        let mut next = vec![vec![BigUint::zero(); dy + 1]; dx + 1];
        for (px, row) in acc.iter().enumerate() {
            for (qy, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (p, q, gc) in &g {
                    let (u, v) = (px + p, qy + q);
                    if u <= dx && v <= dy {
                        next[u][v] += c * gc;
                    }
                }
            }
        }
        acc = next;
    }
    let counts = (0..=a_max).map(|a| (0..=b_max).map(|b| acc[j * a][j * b].clone()).collect()).collect();
    Ok(EnumeratorTable { n, j, k, a_max, b_max, counts })
}
