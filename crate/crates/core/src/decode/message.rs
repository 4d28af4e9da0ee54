use super::{DecodeResult, Tolerances};
use crate::error::{Error, Result};
use crate::graph::TannerGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
enum CheckMsg {
    Unknown,
    /// Value the variable must take if every other unverified neighbour is zero.
    Implied(f64),
    Verified(f64),
}

/// Message-passing verification decoder.
///
/// On each edge the check reports the variable as verified when every other
/// edge is verified (single unknown) or when its residual is zero, and
/// otherwise reports the implied value `residual / weight`. A variable tells
/// a check it is verified when another check verifies it or two other checks
/// imply the same value; it commits its value using all of its checks.
pub fn decode_lm2_mb(graph: &TannerGraph, y: &[f64], tol: &Tolerances) -> Result<DecodeResult> {
    if y.len() != graph.m() {
        return Err(Error::DimensionMismatch { expected: graph.m(), got: y.len() });
    }
    let (n, m, j) = (graph.n(), graph.m(), graph.j());
    let eps0 = tol.zero_threshold(y);
    let ne = graph.edges().len();
    let mut cv = vec![CheckMsg::Unknown; ne];
    let mut vc: Vec<Option<f64>> = vec![None; ne];
    let mut value: Vec<Option<f64>> = vec![None; n];
    let mut unverified = n;

    let mut dirty_checks: Vec<usize> = (0..m).collect();
    let mut check_flag = vec![false; m];
    let mut var_flag = vec![false; n];
    let mut history = Vec::new();
    let mut rounds = 0;
    let mut incoming = vec![CheckMsg::Unknown; j];

    while !dirty_checks.is_empty() && rounds < tol.max_iters && unverified > 0 {
        let mut dirty_vars = Vec::new();
        for &c in &dirty_checks {
            check_flag[c] = false;
            let edges = graph.check_edges(c);
            let mut known = 0.0;
            let mut unknown = 0usize;
            for &e in edges {
                match vc[e] {
                    Some(x) => known += graph.edge(e).weight * x,
                    None => unknown += 1,
                }
            }
            for &e in edges {
                let w = graph.edge(e).weight;
                let (r, unknown_others) = match vc[e] {
                    Some(x) => (y[c] - (known - w * x), unknown),
                    None => (y[c] - known, unknown - 1),
                };
                let msg = if unknown_others == 0 {
                    CheckMsg::Verified(r / w)
                } else if r.abs() <= eps0 {
                    CheckMsg::Verified(0.0)
                } else {
                    CheckMsg::Implied(r / w)
                };
                if msg != cv[e] {
                    cv[e] = msg;
                    let v = graph.edge(e).var;
                    if !var_flag[v] {
                        var_flag[v] = true;
                        dirty_vars.push(v);
                    }
                }
            }
        }
        dirty_vars.sort_unstable();

        let mut next = Vec::new();
        let mut changed = false;
        for &v in &dirty_vars {
            var_flag[v] = false;
            let range = graph.var_edges(v);
            for (slot, e) in range.clone().enumerate() {
                incoming[slot] = cv[e];
            }
            if value[v].is_none() {
                if let Some(x) = resolve(&incoming, None, tol) {
                    value[v] = Some(x);
                    unverified -= 1;
                    changed = true;
                }
            }
            for (slot, e) in range.enumerate() {
                if vc[e].is_some() {
                    continue;
                }
                if let Some(x) = resolve(&incoming, Some(slot), tol) {
                    vc[e] = Some(x);
                    changed = true;
                    let c = graph.edge(e).check;
                    if !check_flag[c] {
                        check_flag[c] = true;
                        next.push(c);
                    }
                }
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
        history.push(unverified);
        next.sort_unstable();
        dirty_checks = next;
    }
    Ok(DecodeResult::from_values(value, rounds, history))
}

/// Verification from a set of check messages, optionally excluding one slot.
fn resolve(msgs: &[CheckMsg], skip: Option<usize>, tol: &Tolerances) -> Option<f64> {
    let others = || msgs.iter().enumerate().filter(move |&(i, _)| Some(i) != skip).map(|(_, m)| *m);
    if let Some(x) = others().find_map(|m| if let CheckMsg::Verified(x) = m { Some(x) } else { None }) {
        return Some(x);
    }
    let implied: Vec<f64> = others().filter_map(|m| if let CheckMsg::Implied(x) = m { Some(x) } else { None }).collect();
    for (a, &x) in implied.iter().enumerate() {
        if implied[a + 1..].iter().any(|&z| tol.values_match(x, z)) {
            return Some(x);
        }
    }
    None
}
