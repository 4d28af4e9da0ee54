use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::TrialSetup;
use crate::decode::{Decoder, Tolerances};
use crate::error::{Error, Result};
use crate::graph::{default_sampling_mode, EnsembleParams, SamplingMode, WeightModel};
use crate::signal::SignalModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Simulate,
    De,
    Threshold,
    Stopping,
    Scaling,
    Infobound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub j: usize,
    pub k: usize,
    pub n: usize,
}

/// Inputs of the entropy bound on the block length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InfoBoundParams {
    /// Entropy of a non-zero value in nats.
    pub hz: f64,
    pub lambda: f64,
    pub omega: f64,
}

impl Default for InfoBoundParams {
    fn default() -> Self {
        Self { hz: 1.0, lambda: 1.0, omega: 0.5 }
    }
}

/// JSON experiment description. Every field except `ensembles` has a
/// default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// `(j, k, n)` triples; analysis modes use only `j` and `k`.
    pub ensembles: Vec<EnsembleSpec>,
    pub signal_model: SignalModel,
    pub weight_model: WeightModel,
    /// Graph constraint; when absent it is chosen per ensemble from the
    /// check-pair count.
    pub sampling_mode: Option<SamplingMode>,
    /// Numbers of non-zeros (or erasures for `bec`) to simulate.
    pub sparsity: Vec<usize>,
    pub decoders: Vec<Decoder>,
    pub trials: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    /// Share one graph per ensemble across all trials.
    pub fixed_graph: bool,
    pub tolerances: Tolerances,
    /// Bisection tolerance for density-evolution thresholds.
    pub de_tolerance: f64,
    /// Target failure fraction for oversampling ratios.
    pub delta: f64,
    /// Number of points on stopping-set exponent curves.
    pub grid_points: usize,
    pub infobound: InfoBoundParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            ensembles: Vec::new(),
            signal_model: SignalModel::Gaussian,
            weight_model: WeightModel::Gaussian,
            sampling_mode: None,
            sparsity: Vec::new(),
            decoders: vec![Decoder::Lm1, Decoder::Lm2Mb, Decoder::Lm2Nb],
            trials: 100,
            base_seed: 0,
            output: None,
            fixed_graph: false,
            tolerances: Tolerances::default(),
            de_tolerance: 1e-6,
            delta: 1e-3,
            grid_points: 50,
            infobound: InfoBoundParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensembles.is_empty() {
            return Err(Error::Config("at least one ensemble is required".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        for e in &self.ensembles {
            EnsembleParams::new(e.j, e.k, e.n, 0)?;
            if let Some(&s) = self.sparsity.iter().find(|&&s| s > e.n) {
                return Err(Error::Config(format!("sparsity {s} exceeds n={}", e.n)));
            }
        }
        if self.mode == Mode::Simulate && (self.decoders.is_empty() || self.sparsity.is_empty()) {
            return Err(Error::Config("simulate needs at least one decoder and one sparsity value".into()));
        }
        if !(self.de_tolerance > 0.0) {
            return Err(Error::Config(format!("de_tolerance={} must be positive", self.de_tolerance)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta={} outside (0, 1)", self.delta)));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        Ok(())
    }

    pub fn trial_setup(&self, e: &EnsembleSpec) -> Result<TrialSetup> {
        EnsembleParams::new(e.j, e.k, e.n, 0)?;
        Ok(TrialSetup {
            j: e.j,
            k: e.k,
            n: e.n,
            signal_model: self.signal_model,
            weight_model: self.weight_model,
            sampling_mode: self.sampling_mode.unwrap_or_else(|| default_sampling_mode(e.j, e.k, e.n)),
            tolerances: self.tolerances,
        })
    }
}
