//! Serializable descriptions of functions and events on a finite product.
//!
//! Outcomes are index vectors `x` with `x[k] < |Lambda_k|`; tables are indexed
//! by the mixed-radix flat index with coordinate 0 most significant.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FnSpec {
    Table { values: Vec<f64> },
    Const { value: f64 },
    /// The value index of coordinate `k`, as a real.
    Coord { k: usize },
    Indicator { k: usize, value: usize },
    Sum { terms: Vec<FnSpec> },
    Product { factors: Vec<FnSpec> },
    Scale { factor: f64, inner: Box<FnSpec> },
    /// 1 if `inner >= at_least`, else 0.
    Step { inner: Box<FnSpec>, at_least: f64 },
}

impl FnSpec {
    pub fn eval(&self, x: &[usize], flat: usize) -> f64 {
        match self {
            FnSpec::Table { values } => values[flat],
            FnSpec::Const { value } => *value,
            FnSpec::Coord { k } => x[*k] as f64,
            FnSpec::Indicator { k, value } => {
                if x[*k] == *value {
                    1.0
                } else {
                    0.0
                }
            }
            FnSpec::Sum { terms } => terms.iter().map(|t| t.eval(x, flat)).sum(),
            FnSpec::Product { factors } => factors.iter().map(|t| t.eval(x, flat)).product(),
            FnSpec::Scale { factor, inner } => factor * inner.eval(x, flat),
            FnSpec::Step { inner, at_least } => {
                if inner.eval(x, flat) >= *at_least {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `sum_k x_k` over `n` coordinates.
    pub fn coordinate_sum(n: usize) -> FnSpec {
        FnSpec::Sum { terms: (0..n).map(|k| FnSpec::Coord { k }).collect() }
    }

    /// Majority of `n` binary coordinates (ties count as 1).
    pub fn majority(n: usize) -> FnSpec {
        FnSpec::Step { inner: Box::new(Self::coordinate_sum(n)), at_least: (n as f64) / 2.0 }
    }

    pub(crate) fn table_len(&self) -> Option<usize> {
        match self {
            FnSpec::Table { values } => Some(values.len()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventSpec {
    All,
    Empty,
    Table { members: Vec<bool> },
    AtLeast { inner: FnSpec, bound: f64 },
    AtMost { inner: FnSpec, bound: f64 },
    /// `x_k in sets[k]` for every `k`.
    InBox { sets: Vec<Vec<usize>> },
    Not { inner: Box<EventSpec> },
    And { parts: Vec<EventSpec> },
    Or { parts: Vec<EventSpec> },
}

impl EventSpec {
    pub fn contains(&self, x: &[usize], flat: usize) -> bool {
        match self {
            EventSpec::All => true,
            EventSpec::Empty => false,
            EventSpec::Table { members } => members[flat],
            EventSpec::AtLeast { inner, bound } => inner.eval(x, flat) >= *bound,
            EventSpec::AtMost { inner, bound } => inner.eval(x, flat) <= *bound,
            EventSpec::InBox { sets } => sets.iter().zip(x).all(|(s, v)| s.contains(v)),
            EventSpec::Not { inner } => !inner.contains(x, flat),
            EventSpec::And { parts } => parts.iter().all(|p| p.contains(x, flat)),
            EventSpec::Or { parts } => parts.iter().any(|p| p.contains(x, flat)),
        }
    }

    pub(crate) fn table_len(&self) -> Option<usize> {
        match self {
            EventSpec::Table { members } => Some(members.len()),
            _ => None,
        }
    }
}
