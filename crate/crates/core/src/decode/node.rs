use super::{DecodeResult, DecoderState, Tolerances};
use crate::error::Result;
use crate::graph::TannerGraph;

/// Node-based verification with the zero-residual and single-unknown rules.
pub fn decode_lm1(graph: &TannerGraph, y: &[f64], tol: &Tolerances) -> Result<DecodeResult> {
    run(graph, y, tol, false)
}

/// Node-based verification that additionally verifies a variable when two
/// checks sharing only that unverified variable imply the same value for it.
pub fn decode_lm2_nb(graph: &TannerGraph, y: &[f64], tol: &Tolerances) -> Result<DecodeResult> {
    run(graph, y, tol, true)
}

struct Proposals {
    list: Vec<(usize, f64)>,
    seen: Vec<bool>,
}

impl Proposals {
    fn push(&mut self, v: usize, x: f64) {
        if !self.seen[v] {
            self.seen[v] = true;
            self.list.push((v, x));
        }
    }
}

fn edges_between(graph: &TannerGraph, v: usize, c: usize) -> usize {
    graph.var_edges(v).filter(|&e| graph.edge(e).check == c).count()
}

fn run(graph: &TannerGraph, y: &[f64], tol: &Tolerances, pairwise: bool) -> Result<DecodeResult> {
    let mut st = DecoderState::new(graph, y)?;
    let eps0 = tol.zero_threshold(y);
    let m = graph.m();
    let mut touched: Vec<usize> = (0..m).collect();
    let mut in_next = vec![false; m];
    let mut props = Proposals { list: Vec::new(), seen: vec![false; graph.n()] };
    let mut history = Vec::new();
    let mut unverified = graph.n();

    while !touched.is_empty() && st.iteration < tol.max_iters && unverified > 0 {
        for &c in &touched {
            if st.active_edges[c] == 0 {
                continue;
            }
            if st.residual[c].abs() <= eps0 {
                for &e in graph.check_edges(c) {
                    let v = graph.edge(e).var;
                    if st.verified_value[v].is_none() {
                        props.push(v, 0.0);
                    }
                }
            } else if st.active_edges[c] == 1 {
                let e = graph.check_edges(c).iter().copied().find(|&e| st.verified_value[graph.edge(e).var].is_none());
                if let Some(e) = e {
                    let edge = graph.edge(e);
                    props.push(edge.var, st.residual[c] / edge.weight);
                }
            }
        }
        if pairwise {
            for &c in &touched {
                pairwise_round(graph, &st, tol, eps0, c, &mut props);
            }
        }
        if props.list.is_empty() {
            break;
        }
        st.iteration += 1;
        let mut next = Vec::new();
        for &(v, x) in &props.list {
            props.seen[v] = false;
            if st.verify(graph, v, x) {
                unverified -= 1;
                for e in graph.var_edges(v) {
                    let c = graph.edge(e).check;
                    if !in_next[c] {
                        in_next[c] = true;
                        next.push(c);
                    }
                }
            }
        }
        props.list.clear();
        next.sort_unstable();
        next.iter().for_each(|&c| in_next[c] = false);
        touched = next;
        history.push(unverified);
    }
    Ok(DecodeResult::from_values(st.verified_value, st.iteration, history))
}

fn pairwise_round(graph: &TannerGraph, st: &DecoderState, tol: &Tolerances, eps0: f64, c: usize, props: &mut Proposals) {
    if st.active_edges[c] < 2 || st.residual[c].abs() <= eps0 {
        return;
    }
    for &e1 in graph.check_edges(c) {
        let v = graph.edge(e1).var;
        if st.verified_value[v].is_some() || edges_between(graph, v, c) != 1 {
            continue;
        }
        let a = st.residual[c] / graph.edge(e1).weight;
        for e2 in graph.var_edges(v) {
            let c2 = graph.edge(e2).check;
            if c2 == c || st.active_edges[c2] == 0 || st.residual[c2].abs() <= eps0 {
                continue;
            }
            let b = st.residual[c2] / graph.edge(e2).weight;
            if !tol.values_match(a, b) || edges_between(graph, v, c2) != 1 || !overlap_is_only(graph, st, c, c2, v) {
                continue;
            }
            props.push(v, a);
            if tol.zero_other_neighbors {
                for &cc in &[c, c2] {
                    for &e in graph.check_edges(cc) {
                        let u = graph.edge(e).var;
                        if u != v && st.verified_value[u].is_none() {
                            props.push(u, 0.0);
                        }
                    }
                }
            }
        }
    }
}

/// True if `v` is the only unverified variable adjacent to both checks.
fn overlap_is_only(graph: &TannerGraph, st: &DecoderState, c1: usize, c2: usize, v: usize) -> bool {
    graph.check_edges(c1).iter().all(|&e| {
        let u = graph.edge(e).var;
        u == v || st.verified_value[u].is_some() || edges_between(graph, u, c2) == 0
    })
}
