use super::DecodeResult;
use crate::error::{Error, Result};
use crate::graph::TannerGraph;
use crate::signal::ErasurePattern;

/// Erasure peeling: a check with exactly one erased edge resolves that
/// variable. Each round resolves every such variable found at its start.
pub fn decode_bec_peeling(graph: &TannerGraph, erasures: &ErasurePattern) -> Result<DecodeResult> {
    if erasures.n() != graph.n() {
        return Err(Error::DimensionMismatch { expected: graph.n(), got: erasures.n() });
    }
    let mut erased = erasures.mask();
    let mut count = vec![0usize; graph.m()];
    for &v in erasures.erased() {
        for e in graph.var_edges(v) {
            count[graph.edge(e).check] += 1;
        }
    }
    let mut remaining = erasures.len();
    let mut candidates: Vec<usize> = (0..graph.m()).filter(|&c| count[c] == 1).collect();
    let mut history = Vec::new();
    let mut iterations = 0;
    while remaining > 0 && !candidates.is_empty() {
        let mut resolve = Vec::new();
        for &c in &candidates {
            if count[c] != 1 {
                continue;
            }
            if let Some(&e) = graph.check_edges(c).iter().find(|&&e| erased[graph.edge(e).var]) {
                resolve.push(graph.edge(e).var);
            }
        }
        resolve.sort_unstable();
        resolve.dedup();
        if resolve.is_empty() {
            break;
        }
        iterations += 1;
        let mut next = Vec::new();
        for v in resolve {
            erased[v] = false;
            remaining -= 1;
            for e in graph.var_edges(v) {
                let c = graph.edge(e).check;
                count[c] -= 1;
                if count[c] == 1 {
                    next.push(c);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        candidates = next;
        history.push(remaining);
    }
    let values = erased.iter().map(|&er| if er { None } else { Some(0.0) }).collect();
    Ok(DecodeResult::from_values(values, iterations, history))
}
