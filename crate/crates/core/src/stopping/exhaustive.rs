use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StoppingFamily;
use crate::error::{Error, Result};
use crate::graph::TannerGraph;

pub const MAX_EXHAUSTIVE_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingCounts {
    /// `counts[s]`: erasure sets of size `s` with no check attached by exactly one edge.
    Bec(Vec<u64>),
    /// `counts[a][b]`: assignments with `a` correct and `b` incorrect
    /// unverified variables from which no check makes progress.
    Lm1(Vec<Vec<u64>>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Verified,
    Correct,
    Incorrect,
}

struct Walker<'a> {
    graph: &'a TannerGraph,
    family: StoppingFamily,
    max_size: usize,
    t: Vec<u32>,
    u: Vec<u32>,
    counts: Vec<Vec<u64>>,
}

impl Walker<'_> {
    fn apply(&mut self, v: usize, role: Role, sign: i32) {
        for e in self.graph.var_edges(v) {
            let c = self.graph.edge(e).check;
            match role {
                Role::Correct => self.t[c] = (self.t[c] as i32 + sign) as u32,
                Role::Incorrect => self.u[c] = (self.u[c] as i32 + sign) as u32,
                Role::Verified => {}
            }
        }
    }

    fn is_stopping(&self) -> bool {
        match self.family {
            StoppingFamily::Bec => self.u.iter().all(|&u| u != 1),
            StoppingFamily::Lm1 => self.t.iter().zip(&self.u).all(|(&t, &u)| !((u == 0 && t > 0) || (u == 1 && t == 0))),
        }
    }

    fn roles(&self) -> &'static [Role] {
        match self.family {
            StoppingFamily::Bec => &[Role::Verified, Role::Incorrect],
            StoppingFamily::Lm1 => &[Role::Verified, Role::Correct, Role::Incorrect],
        }
    }

    fn walk(&mut self, v: usize, a: usize, b: usize) {
        if v == self.graph.n() {
            if self.is_stopping() {
                self.counts[a][b] += 1;
            }
            return;
        }
        for &role in self.roles() {
            let (na, nb) = match role {
                Role::Verified => (a, b),
                Role::Correct => (a + 1, b),
                Role::Incorrect => (a, b + 1),
            };
            if na + nb > self.max_size {
                continue;
            }
            self.apply(v, role, 1);
            self.walk(v + 1, na, nb);
            self.apply(v, role, -1);
        }
    }
}

/// Counts every stopping set of one graph with at most `max_size`
/// unverified variables, by exhaustive enumeration. Neighbourhoods are
/// counted per edge, so parallel edges are handled as in the ensemble.
pub fn exhaustive_stopping_sets(graph: &TannerGraph, family: StoppingFamily, max_size: usize) -> Result<StoppingCounts> {
    let n = graph.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::TooLarge(format!("exhaustive enumeration needs n <= {MAX_EXHAUSTIVE_N}, got {n}")));
    }
    let max_size = max_size.min(n);
    let new_walker = || Walker {
        graph,
        family,
        max_size,
        t: vec![0; graph.m()],
        u: vec![0; graph.m()],
        counts: vec![vec![0; max_size + 1]; max_size + 1],
    };
    let roles = new_walker().roles().to_vec();
    let depth = n.min(2);
    let mut prefixes: Vec<Vec<Role>> = vec![Vec::new()];
    for _ in 0..depth {
        prefixes = prefixes.into_iter().flat_map(|p| roles.iter().map(move |&r| [p.clone(), vec![r]].concat())).collect();
    }
    let partial: Vec<Vec<Vec<u64>>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut w = new_walker();
            let (mut a, mut b) = (0, 0);
            for (v, &role) in prefix.iter().enumerate() {
                match role {
                    Role::Correct => a += 1,
                    Role::Incorrect => b += 1,
                    Role::Verified => {}
                }
                w.apply(v, role, 1);
            }
            if a + b <= max_size {
                w.walk(depth, a, b);
            }
            w.counts
        })
        .collect();
    let mut total = vec![vec![0u64; max_size + 1]; max_size + 1];
    for part in partial {
        for (row, prow) in total.iter_mut().zip(part) {
            for (x, y) in row.iter_mut().zip(prow) {
                *x += y;
            }
        }
    }
    Ok(match family {
        StoppingFamily::Bec => StoppingCounts::Bec(total[0].clone()),
        StoppingFamily::Lm1 => StoppingCounts::Lm1(total),
    })
}
