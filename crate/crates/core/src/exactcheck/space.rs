use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::spec::{EventSpec, FnSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("enumeration needs {required} outcomes, cap is {cap}")]
    TooLarge { required: u128, cap: usize },
    #[error("coordinate {k} has {size} outcomes, cap is {cap}")]
    AlphabetTooLarge { k: usize, size: usize, cap: usize },
    #[error("coordinate {k}: empty alphabet")]
    EmptyAlphabet { k: usize },
    #[error("coordinate {k}: weights sum to {sum}, expected 1")]
    WeightSum { k: usize, sum: f64 },
    #[error("coordinate {k}: invalid weight {w}")]
    Weight { k: usize, w: f64 },
    #[error("space must have at least one coordinate")]
    NoCoordinates,
    #[error("gamma has length {got}, expected {expected}")]
    GammaLength { got: usize, expected: usize },
    #[error("coordinate {k}: gamma = {gamma} outside (0, 1]")]
    Gamma { k: usize, gamma: f64 },
    #[error("table of length {got} does not match {expected} outcomes")]
    TableLength { got: usize, expected: usize },
    #[error("local good sets malformed at coordinate {k}")]
    LocalGood { k: usize },
    #[error("outcome {0:?} is not a point of the space")]
    Outcome(Vec<usize>),
}

/// Enumeration caps, checked before any table is allocated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceLimits {
    pub max_alphabet: usize,
    pub max_outcomes: usize,
}

impl Default for SpaceLimits {
    fn default() -> Self {
        SpaceLimits { max_alphabet: 4, max_outcomes: 1 << 20 }
    }
}

/// A product of finite probability spaces `Lambda_1 x ... x Lambda_N` with a
/// function `f`, a good event `Gamma` and compensation factors `gamma_k`.
///
/// `Lambda_k` is `{0, .., weights[k].len() - 1}`. `local_good`, when present,
/// gives per-coordinate sets `Gamma_k` used by the truncation variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteProductSpace {
    pub weights: Vec<Vec<f64>>,
    pub f: FnSpec,
    pub good: EventSpec,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_good: Option<Vec<Vec<bool>>>,
}

impl FiniteProductSpace {
    pub fn new(weights: Vec<Vec<f64>>, f: FnSpec, good: EventSpec, gamma: Vec<f64>) -> Self {
        FiniteProductSpace { weights, f, good, gamma, local_good: None }
    }

    /// `n` fair coins.
    pub fn fair_bits(n: usize, f: FnSpec, good: EventSpec, gamma: f64) -> Self {
        Self::new(vec![vec![0.5, 0.5]; n], f, good, vec![gamma; n])
    }

    pub fn coords(&self) -> usize {
        self.weights.len()
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.weights.iter().map(Vec::len).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|w| w.len() == 2)
    }

    pub fn outcome_count(&self) -> u128 {
        self.weights.iter().map(|w| w.len() as u128).product()
    }

    pub fn validate(&self, limits: &SpaceLimits) -> Result<(), SpaceError> {
        let n = self.coords();
        if n == 0 {
            return Err(SpaceError::NoCoordinates);
        }
        for (k, w) in self.weights.iter().enumerate() {
            if w.is_empty() {
                return Err(SpaceError::EmptyAlphabet { k });
            }
            if w.len() > limits.max_alphabet {
                return Err(SpaceError::AlphabetTooLarge { k, size: w.len(), cap: limits.max_alphabet });
            }
            if let Some(&bad) = w.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(SpaceError::Weight { k, w: bad });
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(SpaceError::WeightSum { k, sum });
            }
        }
        let required = self.outcome_count();
        if required > limits.max_outcomes as u128 {
            return Err(SpaceError::TooLarge { required, cap: limits.max_outcomes });
        }
        if self.gamma.len() != n {
            return Err(SpaceError::GammaLength { got: self.gamma.len(), expected: n });
        }
        for (k, &g) in self.gamma.iter().enumerate() {
            if !(g > 0.0 && g <= 1.0) {
                return Err(SpaceError::Gamma { k, gamma: g });
            }
        }
        let size = required as usize;
        for len in [self.f.table_len(), self.good.table_len()].into_iter().flatten() {
            if len != size {
                return Err(SpaceError::TableLength { got: len, expected: size });
            }
        }
        if let Some(local) = &self.local_good {
            if local.len() != n {
                return Err(SpaceError::LocalGood { k: local.len() });
            }
            for (k, set) in local.iter().enumerate() {
                if set.len() != self.weights[k].len() || !set.iter().any(|&b| b) {
                    return Err(SpaceError::LocalGood { k });
                }
            }
        }
        Ok(())
    }

    /// Mixed-radix strides, coordinate 0 most significant.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let sizes = self.alphabet_sizes();
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        strides
    }

    pub fn flat_index(&self, x: &[usize]) -> Result<usize, SpaceError> {
        if x.len() != self.coords() || x.iter().zip(&self.weights).any(|(v, w)| *v >= w.len()) {
            return Err(SpaceError::Outcome(x.to_vec()));
        }
        Ok(x.iter().zip(self.strides()).map(|(v, s)| v * s).sum())
    }

    pub(crate) fn decode(&self, mut flat: usize, out: &mut [usize]) {
        for k in (0..out.len()).rev() {
            let size = self.weights[k].len();
            out[k] = flat % size;
            flat /= size;
        }
    }

    /// Whether `x_k` lies in the local good set `Gamma_k` (always true
    /// without local sets).
    pub fn locally_good(&self, k: usize, value: usize) -> bool {
        self.local_good.as_ref().is_none_or(|l| l[k][value])
    }
}
