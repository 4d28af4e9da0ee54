use serde::{Deserialize, Serialize};

use super::bec::{bec_terms, solve_bec_saddle};
use super::scaling::lm1_beta_bar;
use super::{check_jk, ln1p_sum_exp, ln_expm1, ln_pow1p_excess_log, ln_pow1p_m1_log, ExponentPoint, SsCurve, StoppingFamily};
use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, golden_section_max, ternary_entropy};

/// Log-coordinate quantities of `F(x,y) = 1 + (1+x+y)^k - k y - (1+x)^k`
/// at `x = e^s`, `y = e^t`.
struct Terms {
    ln_f: f64,
    /// `x F_x / (k F)`
    a: f64,
    /// `y F_y / (k F)`
    b: f64,
    /// Hessian of `ln F` in `(s, t)`.
    h: [[f64; 2]; 2],
}

fn terms(k: usize, s: f64, t: f64) -> Terms {
    let kf = k as f64;
    let (x, y) = (s.exp(), t.exp());
    let lx = x.ln_1p();
    let lxy = (x + y).ln_1p();
    let ln_u = t - lx;
    let t1 = kf.ln() + t + ln_expm1((kf - 1.0) * lx);
    let t2 = kf * lx + ln_pow1p_excess_log(k as u64, ln_u);
    let ln_f = ln1p_sum_exp(&[t1, t2]);
    let a = (s + (kf - 1.0) * lx + ln_pow1p_m1_log(kf - 1.0, ln_u) - ln_f).exp();
    let b = (t + ln_expm1((kf - 1.0) * lxy) - ln_f).exp();
    let lkk = (kf * (kf - 1.0)).ln();
    let x2 = (lkk + 2.0 * s + (kf - 2.0) * lx + ln_pow1p_m1_log(kf - 2.0, ln_u) - ln_f).exp();
    let xy = (lkk + s + t + (kf - 2.0) * lxy - ln_f).exp();
    let y2 = (lkk + 2.0 * t + (kf - 2.0) * lxy - ln_f).exp();
    let (ka, kb) = (kf * a, kf * b);
    Terms { ln_f, a, b, h: [[ka + x2 - ka * ka, xy - ka * kb], [xy - ka * kb, kb + y2 - kb * kb]] }
}

fn rel_residual(tm: &Terms, alpha: f64, beta: f64) -> (f64, f64) {
    ((tm.a - alpha) / alpha, (tm.b - beta) / beta)
}

/// Damped Newton on the stationarity equations in log coordinates.
fn solve_saddle(k: usize, alpha: f64, beta: f64) -> Result<(f64, f64, f64)> {
    let kf = k as f64;
    let norm = |r: (f64, f64)| r.0.abs().max(r.1.abs());
    // Small-(x, y) start, and a start for alpha near (k-1) beta where the
    // y (1+x)^(k-1) term dominates.
    let gap = if beta > alpha { beta - alpha } else { beta };
    let s_small = (alpha / (gap * (kf - 1.0)).sqrt()).ln().clamp(-700.0, 50.0);
    let t_small = (0.5 * (gap / (kf - 1.0)).ln()).clamp(-700.0, 50.0);
    let ratio = alpha / beta;
    let s_large = (ratio / (kf - 1.0 - ratio)).ln().clamp(-700.0, 50.0);
    let t_large = beta.ln() - (kf - 1.0) * s_large.exp().ln_1p();
    let (mut s, mut t, mut tm, mut r) = [(s_small, t_small), (s_large, t_large)]
        .into_iter()
        .map(|(s, t)| {
            let tm = terms(k, s, t);
            let r = rel_residual(&tm, alpha, beta);
            (s, t, tm, r)
        })
        .filter(|c| c.3 .0.is_finite() && c.3 .1.is_finite())
        .min_by(|a, b| norm(a.3).total_cmp(&norm(b.3)))
        .ok_or_else(|| Error::NonConvergence(format!("no finite start for alpha={alpha}, beta={beta}, k={k}")))?;
    for _ in 0..500 {
        if norm(r) <= 1e-13 {
            break;
        }
        let g = [kf * (tm.a - alpha), kf * (tm.b - beta)];
        let h = tm.h;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let mut d = if det > 0.0 && h[0][0] > 0.0 {
            [-(h[1][1] * g[0] - h[0][1] * g[1]) / det, -(h[0][0] * g[1] - h[1][0] * g[0]) / det]
        } else {
            [-r.0, -r.1]
        };
        let len = d[0].abs().max(d[1].abs());
        if len > 4.0 {
            d = [d[0] * 4.0 / len, d[1] * 4.0 / len];
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (ns, nt) = (s + step * d[0], t + step * d[1]);
            let nt_terms = terms(k, ns, nt);
            let nr = rel_residual(&nt_terms, alpha, beta);
            if nr.0.is_finite() && nr.1.is_finite() && norm(nr) < norm(r) {
                s = ns;
                t = nt;
                tm = nt_terms;
                r = nr;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let res = norm(r);
    if !(res <= 1e-10) {
        return Err(Error::NonConvergence(format!(
            "saddle point for alpha={alpha}, beta={beta}, k={k} stopped at relative residual {res:e}"
        )));
    }
    Ok((s, t, res))
}

/// Exponent bound for stopping sets with `alpha n` correct and `beta n`
/// incorrect unverified variables, at the optimal `(x, y)`.
///
/// Returns `gamma = -inf` when `alpha > (k-1) beta`, where no stopping set
/// exists.
pub fn lm1_gamma(j: usize, k: usize, alpha: f64, beta: f64) -> Result<ExponentPoint> {
    check_jk(j, k)?;
    if !(alpha >= 0.0 && beta > 0.0 && alpha + beta < 1.0) {
        return Err(Error::Domain(format!("need alpha >= 0, beta > 0, alpha + beta < 1; got {alpha}, {beta}")));
    }
    let (jf, kf) = (j as f64, k as f64);
    if alpha > (kf - 1.0) * beta {
        return Ok(ExponentPoint { alpha, beta, x0: f64::NAN, y0: None, gamma: f64::NEG_INFINITY, residual: 0.0 });
    }
    if alpha == (kf - 1.0) * beta {
        return Err(Error::Domain("alpha = (k-1) beta puts the optimal point at infinity".into()));
    }
    if alpha == 0.0 {
        let t = solve_bec_saddle(k, beta)?;
        let (ln_f, b, _) = bec_terms(k, t);
        let gamma = jf / kf * (ln_f - kf * beta * t) + (1.0 - jf) * binary_entropy(beta);
        return Ok(ExponentPoint { alpha, beta, x0: 0.0, y0: Some(t.exp()), gamma, residual: ((b - beta) / beta).abs() });
    }
    let (s, t, residual) = solve_saddle(k, alpha, beta)?;
    let tm = terms(k, s, t);
    let gamma = jf / kf * (tm.ln_f - kf * alpha * s - kf * beta * t) + (1.0 - jf) * ternary_entropy(alpha, beta);
    Ok(ExponentPoint { alpha, beta, x0: s.exp(), y0: Some(t.exp()), gamma, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WPoint {
    pub beta: f64,
    pub w: f64,
    /// Exponent at the maximising `alpha`.
    pub argmax: ExponentPoint,
}

/// `w(beta) = sup_alpha gamma(alpha, beta)`: a grid scan over the feasible
/// `alpha` range followed by golden-section refinement around the best
/// grid point.
pub fn lm1_w(j: usize, k: usize, beta: f64) -> Result<WPoint> {
    check_jk(j, k)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta={beta} outside (0, 1)")));
    }
    let amax = ((k - 1) as f64 * beta).min(1.0 - beta) * (1.0 - 1e-9);
    let mut grid = vec![0.0];
    let n_log = 40;
    for i in 0..n_log {
        grid.push(amax * 10f64.powf(-8.0 + 8.0 * i as f64 / (n_log - 1) as f64));
    }
    let mut best_i = 0;
    let mut best = lm1_gamma(j, k, 0.0, beta)?;
    let mut values = vec![best.gamma];
    for (i, &a) in grid.iter().enumerate().skip(1) {
        let p = lm1_gamma(j, k, a, beta)?;
        values.push(p.gamma);
        if p.gamma > best.gamma {
            best = p;
            best_i = i;
        }
    }
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    if hi > lo {
        let mut failure = None;
        let (a, v) = golden_section_max(
            |a| match lm1_gamma(j, k, a, beta) {
                Ok(p) => p.gamma,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            1e-10,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if v > best.gamma {
            best = lm1_gamma(j, k, a, beta)?;
        }
    }
    Ok(WPoint { beta, w: best.gamma, argmax: best })
}

/// Smallest `beta` at which `w(beta)` becomes positive, by bisection from a
/// bracket around the large-k scale `beta_bar (k-1)^(-j/(j-2))`.
pub fn lm1_beta_star(j: usize, k: usize) -> Result<f64> {
    check_jk(j, k)?;
    let jf = j as f64;
    let guess = lm1_beta_bar(j)?.value() * ((k - 1) as f64).powf(-jf / (jf - 2.0));
    let mut lo = (0.1 * guess).min(0.05);
    let mut hi = (10.0 * guess).min(0.5);
    let mut guard = 0;
    while lm1_w(j, k, lo)?.w >= 0.0 {
        lo *= 0.1;
        guard += 1;
        if guard > 40 {
            return Err(Error::NotFound("w stays non-negative as beta shrinks".into()));
        }
    }
    while lm1_w(j, k, hi)?.w <= 0.0 {
        hi = 0.5 * (hi + 1.0);
        guard += 1;
        if guard > 80 {
            return Err(Error::NotFound("w stays non-positive as beta grows".into()));
        }
    }
    while hi - lo > 1e-8 * hi {
        let mid = 0.5 * (lo + hi);
        if lm1_w(j, k, mid)?.w > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn lm1_curve(j: usize, k: usize, betas: &[f64]) -> Result<SsCurve> {
    let ws = betas.iter().map(|&b| lm1_w(j, k, b)).collect::<Result<Vec<_>>>()?;
    Ok(SsCurve {
        family: StoppingFamily::Lm1,
        j,
        k,
        points: ws.iter().map(|w| w.argmax).collect(),
        critical_ratio: lm1_beta_star(j, k)?,
        w_values: ws.iter().map(|w| w.w).collect(),
    })
}
