//! Monte Carlo experiment runner: configuration, parameter sweeps, empirical
//! thresholds and concentration checks.

mod config;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{EnsembleSpec, ExperimentConfig, Mode};

use crate::decode::{decode_bec_peeling, DecodeResult, DecodeStatus, Decoder, Tolerances};
use crate::error::{Error, Result};
use crate::graph::{assign_edge_weights, sample_regular_graph_with, EnsembleParams, SamplerOptions, SamplingMode, TannerGraph, WeightModel};
use crate::rng::derive_seed;
use crate::signal::{sample_erasures, sample_signal, SignalModel};

const GRAPH_TAG: u64 = 1;
const WEIGHT_TAG: u64 = 2;
const SIGNAL_TAG: u64 = 3;

/// Everything needed to run one trial apart from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSetup {
    pub j: usize,
    pub k: usize,
    pub n: usize,
    pub signal_model: SignalModel,
    pub weight_model: WeightModel,
    pub sampling_mode: SamplingMode,
    pub tolerances: Tolerances,
}

impl TrialSetup {
    /// Gaussian weights and signals, with the default sampling mode for the
    /// ensemble size.
    pub fn new(j: usize, k: usize, n: usize) -> Result<Self> {
        EnsembleParams::new(j, k, n, 0)?;
        Ok(Self {
            j,
            k,
            n,
            signal_model: SignalModel::Gaussian,
            weight_model: WeightModel::Gaussian,
            sampling_mode: crate::graph::default_sampling_mode(j, k, n),
            tolerances: Tolerances::default(),
        })
    }

    pub fn sample_graph(&self, seed: u64) -> Result<TannerGraph> {
        let params = EnsembleParams::new(self.j, self.k, self.n, derive_seed(seed, &[GRAPH_TAG]))?;
        let opts = SamplerOptions { mode: self.sampling_mode, ..SamplerOptions::default() };
        let graph = sample_regular_graph_with(params, opts)?;
        Ok(assign_edge_weights(graph, self.weight_model, derive_seed(seed, &[WEIGHT_TAG])))
    }

    /// Runs one decoder on a fresh signal over `graph`. For the erasure
    /// decoder `num_nonzero` is the number of erasures.
    pub fn run_on(&self, graph: &TannerGraph, decoder: Decoder, num_nonzero: usize, seed: u64) -> Result<DecodeResult> {
        let signal_seed = derive_seed(seed, &[SIGNAL_TAG]);
        match decoder {
            Decoder::Bec => decode_bec_peeling(graph, &sample_erasures(self.n, num_nonzero, signal_seed)?),
            _ => {
                let x = sample_signal(self.n, num_nonzero, self.signal_model, signal_seed)?;
                let y = graph.measure(x.values())?;
                let mut res = decoder.decode(graph, &y, &self.tolerances)?;
                res.check_against(x.values());
                Ok(res)
            }
        }
    }

    /// Samples a graph and runs one trial.
    pub fn run_trial(&self, decoder: Decoder, num_nonzero: usize, seed: u64) -> Result<TrialRecord> {
        let start = Instant::now();
        let graph = self.sample_graph(seed)?;
        let res = self.run_on(&graph, decoder, num_nonzero, seed)?;
        Ok(TrialRecord::new(seed, decoder, num_nonzero, &res, start.elapsed().as_secs_f64()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub decoder: Decoder,
    pub num_nonzero: usize,
    pub status: DecodeStatus,
    pub iterations: usize,
    pub false_verification: bool,
    /// Seconds, including graph sampling.
    pub wall_time: f64,
}

impl TrialRecord {
    fn new(seed: u64, decoder: Decoder, num_nonzero: usize, res: &DecodeResult, wall_time: f64) -> Self {
        Self {
            seed,
            decoder,
            num_nonzero,
            status: res.status,
            iterations: res.iterations,
            false_verification: res.false_verification.unwrap_or(false),
            wall_time,
        }
    }
}

/// One row of the success-rate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub decoder: Decoder,
    pub j: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub num_nonzero: usize,
    pub trials: usize,
    pub successes: usize,
    pub mean_iters: f64,
    pub fv_count: usize,
}

impl SweepRow {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

pub const SWEEP_CSV_HEADER: &str = "decoder,j,k,n,m,num_nonzero,trials,successes,mean_iters,fv_count";

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    /// In (ensemble, point, trial, decoder) order.
    pub records: Vec<TrialRecord>,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    config: &'a ExperimentConfig,
    rows: &'a [SweepRow],
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.4},{}\n",
                r.decoder, r.j, r.k, r.n, r.m, r.num_nonzero, r.trials, r.successes, r.mean_iters, r.fv_count
            ));
        }
        out
    }

    /// Config echo and table rows. Wall times are left out so that reruns
    /// are byte-identical.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SweepJson { config: &self.config, rows: &self.rows })?)
    }

    /// Writes the CSV to `path` and the JSON mirror next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        std::fs::write(path.with_extension("json"), self.to_json()?)?;
        Ok(())
    }
}

/// Runs every (ensemble, sparsity point, decoder) combination of the config.
///
/// Trial `t` at point `p` of ensemble `e` uses the seed
/// `derive_seed(base_seed, [e, p, t])` for every decoder, so decoders are
/// compared on identical graphs and signals. In fixed-graph mode one graph
/// per ensemble is shared by all trials.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (ei, ens) in config.ensembles.iter().enumerate() {
        let setup = config.trial_setup(ens)?;
        let fixed = if config.fixed_graph {
            Some(setup.sample_graph(derive_seed(config.base_seed, &[ei as u64, u64::MAX]))?)
        } else {
            None
        };
        for (pi, &num_nonzero) in config.sparsity.iter().enumerate() {
            let jobs: Vec<usize> = (0..config.trials).collect();
            let per_trial: Vec<Vec<TrialRecord>> = jobs
                .par_iter()
                .map(|&t| {
                    let seed = derive_seed(config.base_seed, &[ei as u64, pi as u64, t as u64]);
                    let start = Instant::now();
                    let graph = match &fixed {
                        Some(g) => g.clone(),
                        None => setup.sample_graph(seed)?,
                    };
                    let setup_time = start.elapsed().as_secs_f64();
                    config
                        .decoders
                        .iter()
                        .map(|&d| {
                            let t0 = Instant::now();
                            let res = setup.run_on(&graph, d, num_nonzero, seed)?;
                            Ok(TrialRecord::new(seed, d, num_nonzero, &res, setup_time + t0.elapsed().as_secs_f64()))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            for (di, &d) in config.decoders.iter().enumerate() {
                let recs: Vec<&TrialRecord> = per_trial.iter().map(|v| &v[di]).collect();
                let successes = recs.iter().filter(|r| r.status == DecodeStatus::Success).count();
                let mean_iters = recs.iter().map(|r| r.iterations as f64).sum::<f64>() / recs.len() as f64;
                let fv_count = recs.iter().filter(|r| r.false_verification).count();
                rows.push(SweepRow {
                    decoder: d,
                    j: ens.j,
                    k: ens.k,
                    n: ens.n,
                    m: ens.n * ens.j / ens.k,
                    num_nonzero,
                    trials: config.trials,
                    successes,
                    mean_iters,
                    fv_count,
                });
            }
            records.extend(per_trial.into_iter().flatten());
        }
    }
    Ok(SweepResult { config: config.clone(), rows, records })
}

/// Success count over `trials` fresh instances at one sparsity.
pub fn success_count(setup: &TrialSetup, decoder: Decoder, num_nonzero: usize, trials: usize, base_seed: u64) -> Result<usize> {
    let ok = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(base_seed, &[num_nonzero as u64, t as u64]);
            Ok(setup.run_trial(decoder, num_nonzero, seed)?.status == DecodeStatus::Success)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(ok.into_iter().filter(|&b| b).count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub decoder: Decoder,
    pub j: usize,
    pub k: usize,
    pub n: usize,
    /// Largest sparsity seen with success rate at least one half.
    pub last_success: usize,
    /// Smallest sparsity seen with success rate below one half.
    pub first_failure: usize,
    /// Midpoint of the final bracket divided by `n`.
    pub delta_hat: f64,
    /// `(num_nonzero, successes)` for every evaluated point, in order.
    pub evaluations: Vec<(usize, usize)>,
}

/// Bisection on the number of non-zeros in `[0, n j / k]` for the 50%
/// success crossing, stopping once the bracket is at most `tol * n` wide.
pub fn empirical_threshold(setup: &TrialSetup, decoder: Decoder, trials: usize, tol: f64, base_seed: u64) -> Result<ThresholdEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let n = setup.n;
    let mut evaluations = Vec::new();
    let mut passes = |nnz: usize| -> Result<bool> {
        let s = success_count(setup, decoder, nnz, trials, base_seed)?;
        evaluations.push((nnz, s));
        Ok(2 * s >= trials)
    };
    let mut lo = 0;
    let mut hi = n * setup.j / setup.k;
    if !passes(lo)? {
        return Err(Error::NonBracketing { always_converges: false });
    }
    if passes(hi)? {
        return Err(Error::NonBracketing { always_converges: true });
    }
    let width = ((tol * n as f64).floor() as usize).max(1);
    while hi - lo > width {
        let mid = lo + (hi - lo) / 2;
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdEstimate {
        decoder,
        j: setup.j,
        k: setup.k,
        n,
        last_success: lo,
        first_failure: hi,
        delta_hat: 0.5 * (lo + hi) as f64 / n as f64,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub decoder: Decoder,
    pub j: usize,
    pub k: usize,
    pub delta: f64,
    pub rounds: usize,
    pub rows: Vec<ConcentrationRow>,
}

impl ConcentrationTable {
    pub fn std_dev_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].std_dev < w[0].std_dev)
    }
}

/// Spread of the unverified fraction after `rounds` decoding rounds across
/// independent trials, for each block length in `n_list`. The signal has
/// `round(delta n)` non-zeros. A decoder that finishes early contributes
/// its final fraction.
pub fn concentration_check(
    setup: &TrialSetup,
    decoder: Decoder,
    n_list: &[usize],
    delta: f64,
    trials: usize,
    rounds: usize,
    base_seed: u64,
) -> Result<ConcentrationTable> {
    if trials < 2 {
        return Err(Error::InvalidParams("need at least 2 trials for a spread".into()));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParams(format!("delta={delta} outside [0, 1]")));
    }
    let mut rows = Vec::new();
    for (ni, &n) in n_list.iter().enumerate() {
        let s = TrialSetup { n, ..*setup };
        let nnz = (delta * n as f64).round() as usize;
        let fractions = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(base_seed, &[ni as u64, t as u64]);
                let graph = s.sample_graph(seed)?;
                let res = s.run_on(&graph, decoder, nnz, seed)?;
                let left = if rounds == 0 {
                    n
                } else {
                    res.unverified_history.get(rounds - 1).copied().unwrap_or(res.unverified_count)
                };
                Ok(left as f64 / n as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = fractions.iter().sum::<f64>() / trials as f64;
        let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        rows.push(ConcentrationRow { n, trials, mean, std_dev: var.sqrt() });
    }
    Ok(ConcentrationTable { decoder, j: setup.j, k: setup.k, delta, rounds, rows })
}
