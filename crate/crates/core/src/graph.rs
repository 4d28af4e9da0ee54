//! Random (j,k)-regular Tanner graphs with real edge weights.
//!
//! Edge `e` owns variable socket `e`, so the edges of variable `v` are
//! exactly `v*j .. (v+1)*j`. Check adjacency is stored as a flat list of
//! `k` edge indices per check.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub j: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl EnsembleParams {
    /// Validates `j >= 2`, `k > j` and `n*j` divisible by `k`, and derives `m`.
    pub fn new(j: usize, k: usize, n: usize, seed: u64) -> Result<Self> {
        if j < 2 {
            return Err(Error::InvalidParams(format!("variable degree j={j} must be at least 2")));
        }
        if k <= j {
            return Err(Error::InvalidParams(format!("check degree k={k} must exceed j={j}")));
        }
        if n == 0 || (n * j) % k != 0 {
            return Err(Error::InvalidParams(format!(
                "n={n} gives n*j={} which is not a positive multiple of k={k}",
                n * j
            )));
        }
        Ok(Self { j, k, n, m: n * j / k, seed })
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.j
    }

    fn validate(&self) -> Result<()> {
        let p = Self::new(self.j, self.k, self.n, self.seed)?;
        if p.m != self.m {
            return Err(Error::InvalidParams(format!("m={} but n*j/k={}", self.m, p.m)));
        }
        Ok(())
    }
}

/// Structural constraints enforced by the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Raw socket matching; parallel edges allowed.
    ConfigurationModel,
    /// No parallel edges.
    Simple,
    /// No parallel edges and no 4-cycles.
    #[default]
    Girth6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub mode: SamplingMode,
    /// Number of fresh socket matchings tried before giving up.
    pub max_restarts: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self { mode: SamplingMode::Girth6, max_restarts: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightModel {
    #[default]
    Unit,
    Gaussian,
}

impl std::str::FromStr for WeightModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(Error::InvalidParams(format!("unknown weight model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub var: usize,
    pub check: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TannerGraph {
    params: EnsembleParams,
    edges: Vec<Edge>,
    check_adj: Vec<usize>,
}

impl TannerGraph {
    /// Builds a graph from an explicit edge list. Edges may come in any order;
    /// they are regrouped by variable. Degrees must be exactly `j` and `k`.
    pub fn from_edges(params: EnsembleParams, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        params.validate()?;
        let (j, k, n, m) = (params.j, params.k, params.n, params.m);
        if edges.len() != n * j {
            return Err(Error::DimensionMismatch { expected: n * j, got: edges.len() });
        }
        let mut by_var: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(j); n];
        for &(v, c, w) in &edges {
            if v >= n || c >= m {
                return Err(Error::InvalidParams(format!("edge ({v},{c}) out of range")));
            }
            if !w.is_finite() || w == 0.0 {
                return Err(Error::InvalidParams(format!("edge ({v},{c}) has weight {w}")));
            }
            by_var[v].push((c, w));
        }
        let mut flat = Vec::with_capacity(n * j);
        for (v, list) in by_var.iter().enumerate() {
            if list.len() != j {
                return Err(Error::InvalidParams(format!("variable {v} has degree {}", list.len())));
            }
            flat.extend(list.iter().map(|&(c, w)| Edge { var: v, check: c, weight: w }));
        }
        let check_of: Vec<usize> = flat.iter().map(|e| e.check).collect();
        let check_adj = build_check_adj(&check_of, m, k)?;
        Ok(Self { params, edges: flat, check_adj })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn j(&self) -> usize {
        self.params.j
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Edge indices incident to variable `v`.
    pub fn var_edges(&self, v: usize) -> std::ops::Range<usize> {
        v * self.params.j..(v + 1) * self.params.j
    }

    /// Edge indices incident to check `c`.
    pub fn check_edges(&self, c: usize) -> &[usize] {
        let k = self.params.k;
        &self.check_adj[c * k..(c + 1) * k]
    }

    /// Computes `y = Phi x`.
    pub fn measure(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        let mut y = vec![0.0; self.m()];
        for (c, yc) in y.iter_mut().enumerate() {
            *yc = self
                .check_edges(c)
                .iter()
                .map(|&e| self.edges[e].weight * x[self.edges[e].var])
                .sum();
        }
        Ok(y)
    }

    /// The `m x n` measurement matrix; parallel edges add up.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.m(), self.n());
        for e in &self.edges {
            a[(e.check, e.var)] += e.weight;
        }
        a
    }

    pub fn has_parallel_edges(&self) -> bool {
        (0..self.n()).any(|v| {
            let r = self.var_edges(v);
            r.clone().any(|a| r.clone().any(|b| a < b && self.edges[a].check == self.edges[b].check))
        })
    }

    /// Largest number of distinct variables shared by two distinct checks.
    /// A value of at most 1 means the graph has no 4-cycles.
    pub fn max_check_overlap(&self) -> usize {
        let m = self.m();
        let mut best = 0;
        let mut count = vec![0usize; m];
        for c in 0..m {
            count.iter_mut().for_each(|x| *x = 0);
            let mut vars: Vec<usize> = self.check_edges(c).iter().map(|&e| self.edges[e].var).collect();
            vars.sort_unstable();
            vars.dedup();
            for &v in &vars {
                let mut checks: Vec<usize> = self.var_edges(v).map(|e| self.edges[e].check).collect();
                checks.sort_unstable();
                checks.dedup();
                for c2 in checks {
                    if c2 != c {
                        count[c2] += 1;
                        best = best.max(count[c2]);
                    }
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            j: self.j(),
            k: self.k(),
            n: self.n(),
            m: self.m(),
            seed: self.params.seed,
            edges: self.edges.iter().map(|e| (e.var, e.check, e.weight)).collect(),
        }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        let params = EnsembleParams { j: g.j, k: g.k, n: g.n, m: g.m, seed: g.seed };
        Self::from_edges(params, g.edges.clone())
    }
}

/// On-disk form of a graph: `{j,k,n,m,seed,edges:[[v,c,w],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub j: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub edges: Vec<(usize, usize, f64)>,
}

fn build_check_adj(check_of: &[usize], m: usize, k: usize) -> Result<Vec<usize>> {
    let mut fill = vec![0usize; m];
    let mut adj = vec![0usize; m * k];
    for (e, &c) in check_of.iter().enumerate() {
        if fill[c] == k {
            return Err(Error::InvalidParams(format!("check {c} has degree above {k}")));
        }
        adj[c * k + fill[c]] = e;
        fill[c] += 1;
    }
    if let Some(c) = fill.iter().position(|&f| f != k) {
        return Err(Error::InvalidParams(format!("check {c} has degree {}", fill[c])));
    }
    Ok(adj)
}

/// Girth 6 when the check-pair count leaves at least half the pairs unused,
/// otherwise simple graphs.
pub fn default_sampling_mode(j: usize, k: usize, n: usize) -> SamplingMode {
    let m = n * j / k;
    if n * j * (j - 1) <= m * m.saturating_sub(1) / 2 {
        SamplingMode::Girth6
    } else {
        SamplingMode::Simple
    }
}

/// Samples a graph with unit weights under the default girth-6 constraint.
pub fn sample_regular_graph(params: EnsembleParams) -> Result<TannerGraph> {
    sample_regular_graph_with(params, SamplerOptions::default())
}

/// Samples a (j,k)-regular graph with unit weights.
///
/// A uniform socket matching is drawn and then repaired by degree-preserving
/// swaps of check endpoints: each offending edge exchanges its check with a
/// random edge, and the swap is kept only if neither edge ends up in a
/// forbidden structure. If a matching cannot be repaired within the swap
/// budget a fresh one is drawn, up to `max_restarts` times.
pub fn sample_regular_graph_with(params: EnsembleParams, opts: SamplerOptions) -> Result<TannerGraph> {
    params.validate()?;
    let EnsembleParams { j, k, n, m, .. } = params;
    if n * j < 2 * k {
        return Err(Error::ConstraintUnsatisfiable {
            restarts: 0,
            reason: format!("n*j={} is below 2k={}", n * j, 2 * k),
        });
    }
    if opts.mode != SamplingMode::ConfigurationModel && m < j {
        return Err(Error::ConstraintUnsatisfiable {
            restarts: 0,
            reason: format!("m={m} checks cannot give each variable {j} distinct neighbours"),
        });
    }
    if opts.mode == SamplingMode::Girth6 {
        // every variable uses C(j,2) distinct check pairs; there are only C(m,2)
        let need = n * j * (j - 1) / 2;
        let have = m * (m - 1) / 2;
        if need > have {
            return Err(Error::ConstraintUnsatisfiable {
                restarts: 0,
                reason: format!("a 4-cycle-free graph needs {need} distinct check pairs but only {have} exist"),
            });
        }
    }

    let ne = n * j;
    let mut rng = rng_from_seed(derive_seed(params.seed, &[0x6772_6170_68]));
    let mut restarts = 0;
    loop {
        let mut sockets: Vec<usize> = (0..ne).map(|s| s / k).collect();
        sockets.shuffle(&mut rng);
        let mut work = Matching::new(sockets, j, k, m, opts.mode);
        if work.repair(&mut rng, 200 * ne + 10_000) {
            let edges = work.check_of.iter().enumerate().map(|(e, &c)| Edge { var: e / j, check: c, weight: 1.0 }).collect();
            let check_adj = build_check_adj(&work.check_of, m, k)?;
            return Ok(TannerGraph { params, edges, check_adj });
        }
        restarts += 1;
        if restarts >= opts.max_restarts {
            return Err(Error::ConstraintUnsatisfiable {
                restarts,
                reason: format!("could not satisfy {:?} constraints for (j={j},k={k},n={n})", opts.mode),
            });
        }
    }
}

struct Matching {
    check_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    j: usize,
    mode: SamplingMode,
}

impl Matching {
    fn new(check_of: Vec<usize>, j: usize, k: usize, m: usize, mode: SamplingMode) -> Self {
        let mut members = vec![Vec::with_capacity(k); m];
        for (e, &c) in check_of.iter().enumerate() {
            members[c].push(e);
        }
        Self { check_of, members, j, mode }
    }

    fn is_good(&self, e: usize) -> bool {
        let j = self.j;
        let v = e / j;
        let c = self.check_of[e];
        let own = v * j..(v + 1) * j;
        if own.clone().any(|e2| e2 != e && self.check_of[e2] == c) {
            return false;
        }
        if self.mode != SamplingMode::Girth6 {
            return true;
        }
        for e2 in own.filter(|&e2| e2 != e) {
            let c2 = self.check_of[e2];
            for &g in &self.members[c] {
                let u = g / j;
                if u == v {
                    continue;
                }
                if (u * j..(u + 1) * j).any(|h| self.check_of[h] == c2) {
                    return false;
                }
            }
        }
        true
    }

    fn move_edge(&mut self, e: usize, to: usize) {
        let from = self.check_of[e];
        let list = &mut self.members[from];
        let pos = list.iter().position(|&x| x == e).expect("edge listed under its check");
        list.swap_remove(pos);
        self.members[to].push(e);
        self.check_of[e] = to;
    }

    fn swap_checks(&mut self, a: usize, b: usize) {
        let (ca, cb) = (self.check_of[a], self.check_of[b]);
        self.move_edge(a, cb);
        self.move_edge(b, ca);
    }

    fn repair(&mut self, rng: &mut TrialRng, budget: usize) -> bool {
        if self.mode == SamplingMode::ConfigurationModel {
            return true;
        }
        let ne = self.check_of.len();
        let mut attempts = 0;
        loop {
            let bad: Vec<usize> = (0..ne).filter(|&e| !self.is_good(e)).collect();
            if bad.is_empty() {
                return true;
            }
            for e in bad {
                if self.is_good(e) {
                    continue;
                }
                loop {
                    attempts += 1;
                    if attempts > budget {
                        return false;
                    }
                    let f = rng.random_range(0..ne);
                    if self.check_of[f] == self.check_of[e] {
                        continue;
                    }
                    self.swap_checks(e, f);
                    if self.is_good(e) && self.is_good(f) {
                        break;
                    }
                    self.swap_checks(e, f);
                }
            }
        }
    }
}

/// Replaces every edge weight according to `model`; Gaussian draws that are
/// exactly zero are redrawn.
pub fn assign_edge_weights(mut graph: TannerGraph, model: WeightModel, seed: u64) -> TannerGraph {
    match model {
        WeightModel::Unit => graph.edges.iter_mut().for_each(|e| e.weight = 1.0),
        WeightModel::Gaussian => {
            let mut rng = rng_from_seed(derive_seed(seed, &[0x7765_6967_6874]));
            for e in graph.edges.iter_mut() {
                e.weight = loop {
                    let w: f64 = rng.sample(StandardNormal);
                    if w != 0.0 {
                        break w;
                    }
                };
            }
        }
    }
    graph
}
