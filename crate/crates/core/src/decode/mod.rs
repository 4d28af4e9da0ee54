//! Verification decoders, the erasure peeling decoder and an exhaustive
//! least-support reconstruction oracle.
//!
//! All decoders count neighbours per edge: a check with two edges to the same
//! unverified variable has two unverified edges.

mod message;
mod node;
mod oracle;
mod peeling;

use serde::{Deserialize, Serialize};

pub use message::decode_lm2_mb;
pub use node::{decode_lm1, decode_lm2_nb};
pub use oracle::{brute_force_reconstruct, OracleSolution, MAX_ORACLE_N};
pub use peeling::decode_bec_peeling;

use crate::error::{Error, Result};
use crate::graph::TannerGraph;
use crate::signal::SignalVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// A residual counts as zero when `|r| <= zero_rel * max(1, max|y|)`.
    pub zero_rel: f64,
    /// Two implied values `a`, `b` match when `|a - b| <= match_rel * max(1, |a|)`.
    pub match_rel: f64,
    pub max_iters: usize,
    /// When two checks agree on a shared variable, also verify every other
    /// unverified neighbour of both checks to zero.
    pub zero_other_neighbors: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero_rel: 1e-12, match_rel: 1e-9, max_iters: 100_000, zero_other_neighbors: true }
    }
}

impl Tolerances {
    pub fn zero_threshold(&self, y: &[f64]) -> f64 {
        let ymax = y.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        self.zero_rel * ymax.max(1.0)
    }

    pub fn values_match(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.match_rel * a.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    Lm1,
    #[serde(alias = "lm2_mb")]
    Lm2Mb,
    #[serde(alias = "lm2_nb")]
    Lm2Nb,
    Bec,
}

impl Decoder {
    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Lm1 => "lm1",
            Decoder::Lm2Mb => "lm2mb",
            Decoder::Lm2Nb => "lm2nb",
            Decoder::Bec => "bec",
        }
    }

    /// Runs a verification decoder on measurements `y`. The erasure decoder
    /// has no measurement input; use [`decode_bec_peeling`] for it.
    pub fn decode(&self, graph: &TannerGraph, y: &[f64], tol: &Tolerances) -> Result<DecodeResult> {
        match self {
            Decoder::Lm1 => decode_lm1(graph, y, tol),
            Decoder::Lm2Nb => decode_lm2_nb(graph, y, tol),
            Decoder::Lm2Mb => decode_lm2_mb(graph, y, tol),
            Decoder::Bec => Err(Error::InvalidParams("the erasure decoder takes an erasure pattern, not measurements".into())),
        }
    }
}

impl std::str::FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lm1" => Ok(Decoder::Lm1),
            "lm2mb" | "lm2-mb" => Ok(Decoder::Lm2Mb),
            "lm2nb" | "lm2-nb" => Ok(Decoder::Lm2Nb),
            "bec" => Ok(Decoder::Bec),
            other => Err(Error::InvalidParams(format!("unknown decoder '{other}'"))),
        }
    }
}

impl std::fmt::Display for Decoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Mutable decoding state for the node-based decoders.
#[derive(Debug, Clone)]
pub struct DecoderState {
    pub verified_value: Vec<Option<f64>>,
    /// Measurement minus the contributions of verified variables.
    pub residual: Vec<f64>,
    /// Number of edges from each check to unverified variables.
    pub active_edges: Vec<usize>,
    pub iteration: usize,
}

impl DecoderState {
    pub fn new(graph: &TannerGraph, y: &[f64]) -> Result<Self> {
        if y.len() != graph.m() {
            return Err(Error::DimensionMismatch { expected: graph.m(), got: y.len() });
        }
        Ok(Self {
            verified_value: vec![None; graph.n()],
            residual: y.to_vec(),
            active_edges: vec![graph.k(); graph.m()],
            iteration: 0,
        })
    }

    /// Marks `v` verified and subtracts its contribution. Returns false if
    /// `v` was already verified.
    pub fn verify(&mut self, graph: &TannerGraph, v: usize, value: f64) -> bool {
        if self.verified_value[v].is_some() {
            return false;
        }
        self.verified_value[v] = Some(value);
        for e in graph.var_edges(v) {
            let edge = graph.edge(e);
            self.residual[edge.check] -= edge.weight * value;
            self.active_edges[edge.check] -= 1;
        }
        true
    }

    pub fn unverified_count(&self) -> usize {
        self.verified_value.iter().filter(|v| v.is_none()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Success,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Verified values, with zeros at unverified positions.
    pub recovered: SignalVector,
    pub verified: Vec<bool>,
    /// Number of rounds that made progress: a new verified variable, or for
    /// the message-based decoder a new verified message.
    pub iterations: usize,
    pub unverified_count: usize,
    /// Unverified count after each productive round. Strictly decreasing
    /// for node-based decoders, non-increasing for the message-based one.
    pub unverified_history: Vec<usize>,
    /// Set by [`DecodeResult::check_against`].
    pub false_verification: Option<bool>,
}

impl DecodeResult {
    pub(crate) fn from_values(values: Vec<Option<f64>>, iterations: usize, history: Vec<usize>) -> Self {
        let verified: Vec<bool> = values.iter().map(|v| v.is_some()).collect();
        let unverified_count = verified.iter().filter(|&&b| !b).count();
        let recovered = SignalVector::from_values(values.iter().map(|v| v.unwrap_or(0.0)).collect());
        let status = if unverified_count == 0 { DecodeStatus::Success } else { DecodeStatus::Stalled };
        Self { status, recovered, verified, iterations, unverified_count, unverified_history: history, false_verification: None }
    }

    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Success
    }

    /// Compares verified entries with the ground truth and records whether any
    /// of them is wrong (relative tolerance `1e-7`).
    pub fn check_against(&mut self, truth: &[f64]) -> bool {
        let fv = self
            .verified
            .iter()
            .zip(self.recovered.values())
            .zip(truth)
            .any(|((&ok, &x), &t)| ok && (x - t).abs() > 1e-7 * t.abs().max(1.0));
        self.false_verification = Some(fv);
        fv
    }
}
