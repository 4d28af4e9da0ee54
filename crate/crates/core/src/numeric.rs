//! Small numerical kernels shared by the analysis modules.

/// `(1 - x)^k` for `x <= 1`, evaluated through `ln_1p` so large `k` does not lose precision.
pub fn pow_one_minus(x: f64, k: f64) -> f64 {
    if x >= 1.0 {
        return if k == 0.0 { 1.0 } else { 0.0 };
    }
    (k * (-x).ln_1p()).exp()
}

/// `1 - (1 - x)^k` for `x <= 1`.
pub fn one_minus_pow_one_minus(x: f64, k: f64) -> f64 {
    if x >= 1.0 {
        return if k == 0.0 { 0.0 } else { 1.0 };
    }
    -(k * (-x).ln_1p()).exp_m1()
}

/// `(1 + u)^k - 1 - k u` for `u >= 0`; all terms of the binomial expansion are
/// non-negative so the series form is exact to rounding when `k u` is small.
pub fn pow1p_excess(k: u64, u: f64) -> f64 {
    let kf = k as f64;
    if k < 2 || u == 0.0 {
        return 0.0;
    }
    if kf * u <= 1.0 {
        binomial_tail_series(k, u)
    } else {
        (kf * u.ln_1p()).exp() - 1.0 - kf * u
    }
}

/// `ln((1 + u)^k - 1 - k u)`; overflow-free for large `k u`.
pub fn ln_pow1p_excess(k: u64, u: f64) -> f64 {
    let kf = k as f64;
    if k < 2 || u == 0.0 {
        return f64::NEG_INFINITY;
    }
    if kf * u <= 1.0 {
        return binomial_tail_series(k, u).ln();
    }
    let l = kf * u.ln_1p();
    if l < 600.0 {
        (l.exp() - 1.0 - kf * u).ln()
    } else {
        l + (-(1.0 + kf * u) * (-l).exp()).ln_1p()
    }
}

fn binomial_tail_series(k: u64, u: f64) -> f64 {
    let kf = k as f64;
    let mut term = kf * (kf - 1.0) / 2.0 * u * u;
    let mut sum = term;
    let mut i = 2u64;
    while i < k {
        term *= (k - i) as f64 / (i + 1) as f64 * u;
        sum += term;
        if term <= sum * 1e-18 {
            break;
        }
        i += 1;
    }
    sum
}

/// `p ln p` with the convention `0 ln 0 = 0`.
pub fn xlnx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// Binary entropy in nats.
pub fn binary_entropy(a: f64) -> f64 {
    let tail = if a >= 1.0 { 0.0 } else { (1.0 - a) * (-a).ln_1p() };
    -xlnx(a) - tail
}

/// Ternary entropy `h(a, b, 1 - a - b)` in nats.
pub fn ternary_entropy(a: f64, b: f64) -> f64 {
    let s = a + b;
    let tail = if s >= 1.0 { 0.0 } else { (1.0 - s) * (-s).ln_1p() };
    -xlnx(a) - xlnx(b) - tail
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol * (1.0 + c.abs().max(d.abs())) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, fx) = golden_section_min(|t| -f(t), lo, hi, tol);
    (x, -fx)
}

/// Bisection on a predicate that is `true` on `[lo, t)` and `false` on `(t, hi]`.
/// Returns the final `(lo, hi)` bracket.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut below: P, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..400 {
        if hi - lo <= tol * (1.0 + lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Evaluation grid for "for all y in (0, 1]" checks: 10^4 uniform points on
/// (0, 1] plus 10^2 log-spaced points in [1e-10, 1e-4].
pub fn unit_interval_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..100)
        .map(|i| 10f64.powf(-10.0 + 6.0 * i as f64 / 99.0))
        .collect();
    g.extend((1..=10_000).map(|i| i as f64 / 10_000.0));
    g
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn excess_matches_direct_evaluation() {
        for &(k, u) in &[(6u64, 0.3), (6, 0.01), (1000, 1e-4), (14, 2.0), (50, 0.5)] {
            let direct = (1.0 + u as f64).powi(k as i32) - 1.0 - k as f64 * u;
            assert_relative_eq!(pow1p_excess(k, u), direct, max_relative = 1e-9);
            assert_relative_eq!(ln_pow1p_excess(k, u), direct.ln(), max_relative = 1e-9);
        }
        // no cancellation: leading term C(k,2) u^2
        let v = pow1p_excess(1000, 1e-9);
        assert_relative_eq!(v, 499_500.0 * 1e-18, max_relative = 1e-5);
    }

    #[test]
    fn ln_excess_survives_overflow() {
        let l = ln_pow1p_excess(1000, 5.0);
        assert_relative_eq!(l, 1000.0 * 6f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn entropies() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_relative_eq!(binary_entropy(0.5), 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(ternary_entropy(1.0 / 3.0, 1.0 / 3.0), 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ternary_entropy(0.2, 0.0), binary_entropy(0.2), max_relative = 1e-15);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|t| (t - 0.3) * (t - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_helpers() {
        let (lo, hi) = bisect_predicate(|t| t < 0.25, 0.0, 1.0, 1e-9);
        assert!(lo <= 0.25 && hi >= 0.25 && hi - lo <= 1e-9);
        let r = bisect_root(|t| t * t - 2.0, 0.0, 2.0, 1e-14);
        assert_relative_eq!(r, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = unit_interval_grid();
        assert_eq!(g.len(), 10_100);
        assert!(g.iter().all(|&y| y > 0.0 && y <= 1.0));
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
