//! Strictly sparse test signals and erasure patterns.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalVector {
    values: Vec<f64>,
    support: Vec<usize>,
}

impl SignalVector {
    pub fn from_values(values: Vec<f64>) -> Self {
        let support = values.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, _)| i).collect();
        Self { values, support }
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n], support: Vec::new() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Sorted indices of the non-zero entries.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of non-zero entries.
    pub fn sparsity(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.support.len() as f64 / self.values.len() as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalModel {
    /// Non-zero entries are +1 or -1 with equal probability.
    #[default]
    ZeroOne,
    /// Non-zero entries are standard normal.
    Gaussian,
    /// Absolute values of standard normal draws.
    NonNegativeGaussian,
}

impl std::str::FromStr for SignalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_one" | "zero-one" => Ok(Self::ZeroOne),
            "gaussian" => Ok(Self::Gaussian),
            "nonnegative_gaussian" | "non-negative-gaussian" => Ok(Self::NonNegativeGaussian),
            other => Err(Error::InvalidParams(format!("unknown signal model '{other}'"))),
        }
    }
}

/// Draws a length-`n` signal with exactly `num_nonzero` non-zeros on a
/// uniformly random support.
pub fn sample_signal(n: usize, num_nonzero: usize, model: SignalModel, seed: u64) -> Result<SignalVector> {
    if num_nonzero > n {
        return Err(Error::InvalidParams(format!("num_nonzero={num_nonzero} exceeds n={n}")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, &[0x7369_676e_616c]));
    let mut support = index::sample(&mut rng, n, num_nonzero).into_vec();
    support.sort_unstable();
    let mut values = vec![0.0; n];
    for &i in &support {
        values[i] = loop {
            let x: f64 = match model {
                SignalModel::ZeroOne => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                SignalModel::Gaussian => rng.sample(StandardNormal),
                SignalModel::NonNegativeGaussian => rng.sample::<f64, _>(StandardNormal).abs(),
            };
            if x != 0.0 {
                break x;
            }
        };
    }
    Ok(SignalVector { values, support })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    n: usize,
    erased: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, mut erased: Vec<usize>) -> Result<Self> {
        erased.sort_unstable();
        erased.dedup();
        if let Some(&i) = erased.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidParams(format!("erased index {i} out of range for n={n}")));
        }
        Ok(Self { n, erased })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted erased indices.
    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n];
        self.erased.iter().for_each(|&i| m[i] = true);
        m
    }
}

/// Uniformly random erasure set of size `num_erased`.
pub fn sample_erasures(n: usize, num_erased: usize, seed: u64) -> Result<ErasurePattern> {
    if num_erased > n {
        return Err(Error::InvalidParams(format!("num_erased={num_erased} exceeds n={n}")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, &[0x6572_6173_65]));
    let mut erased = index::sample(&mut rng, n, num_erased).into_vec();
    erased.sort_unstable();
    Ok(ErasurePattern { n, erased })
}
