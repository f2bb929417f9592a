//! Closed-form tail bounds for functions of independent random variables.
//!
//! Every bound is reported as a [`TailBound`]: the probability value, the
//! exponent it was computed from, and the intermediate quantities (error
//! terms, variance proxy, maximal step) so callers can inspect or compare
//! them. Comparisons between bounds should use the exponent, which does not
//! underflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("negative argument {name} = {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} has length {got}, expected {expected}")]
    Length { name: &'static str, got: usize, expected: usize },
    #[error("profile must have at least one coordinate")]
    Empty,
    #[error("coordinate {k}: c = {c} exceeds d = {d}")]
    CExceedsD { k: usize, c: f64, d: f64 },
    #[error("coordinate {k}: gamma = {gamma} outside (0, 1]")]
    Gamma { k: usize, gamma: f64 },
    #[error("coordinate {k}: {name} = {value} outside its admissible range")]
    Probability { k: usize, name: &'static str, value: f64 },
    #[error("non-finite value in {name}")]
    NonFinite { name: &'static str },
    #[error("success probabilities p are required for this bound")]
    MissingP,
    #[error("minimum outcome probabilities q are required for two-sided error terms")]
    MissingQ,
    #[error("asymmetric variant needs p_k < 1, but p_{k} = 1")]
    AsymmetricUnitP { k: usize },
    #[error("bad-event probability {0} must be in [0, 1)")]
    BadProbability(f64),
    #[error("query-set family is empty")]
    EmptyFamily,
    #[error("query aggregate lacks {0}")]
    MissingAggregate(&'static str),
}

/// Per-coordinate Lipschitz data shared by all bounded differences formulas.
///
/// `c` are the typical coefficients, `d` the worst-case ones, `gamma` the
/// compensation factors. `p` (success probabilities) and `q` (minimum
/// outcome probabilities) are only needed by the Bernoulli and two-sided
/// variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProfile {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
}

impl LipschitzProfile {
    pub fn new(c: Vec<f64>, d: Vec<f64>, gamma: Vec<f64>) -> Result<Self, BoundError> {
        let profile = LipschitzProfile { c, d, gamma, p: None, q: None };
        profile.validate()?;
        Ok(profile)
    }

    /// A worst-case profile: `d = c` and `gamma = 1`, so every typical bound
    /// collapses to its classical counterpart.
    pub fn worst_case(c: Vec<f64>) -> Result<Self, BoundError> {
        let n = c.len();
        Self::new(c.clone(), c, vec![1.0; n])
    }

    /// Uniform parameters across `n` coordinates.
    pub fn uniform(n: usize, c: f64, d: f64, gamma: f64) -> Result<Self, BoundError> {
        Self::new(vec![c; n], vec![d; n], vec![gamma; n])
    }

    pub fn with_p(mut self, p: Vec<f64>) -> Result<Self, BoundError> {
        self.p = Some(p);
        self.validate()?;
        Ok(self)
    }

    pub fn with_q(mut self, q: Vec<f64>) -> Result<Self, BoundError> {
        self.q = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        let n = self.c.len();
        if n == 0 {
            return Err(BoundError::Empty);
        }
        check_len("d", self.d.len(), n)?;
        check_len("gamma", self.gamma.len(), n)?;
        for k in 0..n {
            let (c, d, g) = (self.c[k], self.d[k], self.gamma[k]);
            if !c.is_finite() || !d.is_finite() || !g.is_finite() {
                return Err(BoundError::NonFinite { name: "profile" });
            }
            if c < 0.0 {
                return Err(BoundError::Negative { name: "c", value: c });
            }
            if c > d {
                return Err(BoundError::CExceedsD { k, c, d });
            }
            if !(g > 0.0 && g <= 1.0) {
                return Err(BoundError::Gamma { k, gamma: g });
            }
        }
        if let Some(p) = &self.p {
            check_len("p", p.len(), n)?;
            for (k, &v) in p.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(BoundError::Probability { k, name: "p", value: v });
                }
            }
        }
        if let Some(q) = &self.q {
            check_len("q", q.len(), n)?;
            for (k, &v) in q.iter().enumerate() {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(BoundError::Probability { k, name: "q", value: v });
                }
            }
        }
        Ok(())
    }

    /// One-sided error terms `e_k = gamma_k (d_k - c_k)`.
    pub fn error_terms(&self) -> Vec<f64> {
        self.c
            .iter()
            .zip(&self.d)
            .zip(&self.gamma)
            .map(|((c, d), g)| g * (d - c))
            .collect()
    }

    /// `sum_k gamma_k^{-1}`, the multiplier of the bad-event budget.
    pub fn inverse_gamma_sum(&self) -> f64 {
        self.gamma.iter().map(|g| 1.0 / g).sum()
    }
}

fn check_len(name: &'static str, got: usize, expected: usize) -> Result<(), BoundError> {
    if got != expected {
        return Err(BoundError::Length { name, got, expected });
    }
    Ok(())
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), BoundError> {
    if value.is_nan() {
        return Err(BoundError::NonFinite { name });
    }
    if value < 0.0 {
        return Err(BoundError::Negative { name, value });
    }
    Ok(())
}

/// A tail probability bound `min(1, exp(-exponent))` with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub value: f64,
    pub exponent: f64,
    pub variance_term: Option<f64>,
    pub max_term: Option<f64>,
    pub error_terms: Vec<f64>,
    pub bad_budget: Option<f64>,
}

impl TailBound {
    fn from_exponent(exponent: f64) -> Self {
        let exponent = if exponent.is_nan() { 0.0 } else { exponent.max(0.0) };
        TailBound {
            value: (-exponent).exp().min(1.0),
            exponent,
            variance_term: None,
            max_term: None,
            error_terms: Vec::new(),
            bad_budget: None,
        }
    }

    /// Bound of a deviation that cannot happen (constant function, t > 0).
    fn impossible() -> Self {
        Self::from_exponent(f64::INFINITY)
    }

    fn trivial() -> Self {
        Self::from_exponent(0.0)
    }
}

/// `(1 + x) ln(1 + x) - x`, evaluated without cancellation near zero.
pub fn phi(x: f64) -> Result<f64, BoundError> {
    check_nonneg("x", x)?;
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x < 1e-4 {
        // Taylor series: x^2/2 - x^3/6 + x^4/12 - x^5/20
        let x2 = x * x;
        return Ok(x2 * (0.5 - x / 6.0 + x2 / 12.0 - x2 * x / 20.0));
    }
    Ok((1.0 + x) * x.ln_1p() - x)
}

/// Exponent of the Bernstein form `t^2 / (2V + 2Ct/3)`.
pub fn bernstein_exponent(variance: f64, max_step: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let denom = 2.0 * variance + 2.0 * max_step * t / 3.0;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    t * t / denom
}

/// Exponent of the Bennett form `V/C^2 * phi(Ct/V)`.
///
/// For `V = 0` the limit is `+inf` when `t > C` would be impossible, but the
/// formula itself tends to infinity for every `t > 0`, which is what we return.
pub fn bennett_exponent(variance: f64, max_step: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if variance <= 0.0 {
        return f64::INFINITY;
    }
    if max_step <= 0.0 {
        // C -> 0 limit of V/C^2 phi(Ct/V) is t^2/(2V).
        return t * t / (2.0 * variance);
    }
    let x = max_step * t / variance;
    variance / (max_step * max_step) * phi(x).expect("x >= 0")
}

/// Classical bounded differences inequality, `exp(-2t^2 / sum c_k^2)`.
pub fn bdi_bound(profile: &LipschitzProfile, t: f64) -> Result<TailBound, BoundError> {
    profile.validate()?;
    check_nonneg("t", t)?;
    if t == 0.0 {
        return Ok(TailBound::trivial());
    }
    let sum_sq: f64 = profile.c.iter().map(|c| c * c).sum();
    if sum_sq == 0.0 {
        return Ok(TailBound::impossible());
    }
    let mut bound = TailBound::from_exponent(2.0 * t * t / sum_sq);
    bound.variance_term = Some(sum_sq);
    Ok(bound)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TbdiOptions {
    /// `P(X not in Gamma)`, used for the bad-event budget.
    pub gamma_fail: Option<f64>,
    /// All coordinates are two-valued: the exponent is multiplied by 4.
    pub two_valued: bool,
    /// Use the two-sided error terms `2 gamma_k (d_k - c_k) / q_k`.
    pub two_sided: bool,
}

fn errors_for(profile: &LipschitzProfile, two_sided: bool) -> Result<Vec<f64>, BoundError> {
    if two_sided {
        two_sided_error(profile)
    } else {
        Ok(profile.error_terms())
    }
}

fn budget(profile: &LipschitzProfile, gamma_fail: Option<f64>) -> Result<Option<f64>, BoundError> {
    match gamma_fail {
        None => Ok(None),
        Some(g) => {
            if !(0.0..=1.0).contains(&g) {
                return Err(BoundError::BadProbability(g));
            }
            Ok(Some((profile.inverse_gamma_sum() * g).clamp(0.0, 1.0)))
        }
    }
}

/// Typical bounded differences inequality: on the complement of the bad
/// event, `P(f >= mu + t) <= exp(-t^2 / (2 sum (c_k + e_k)^2))`.
pub fn tbdi_bound(
    profile: &LipschitzProfile,
    t: f64,
    opts: &TbdiOptions,
) -> Result<TailBound, BoundError> {
    profile.validate()?;
    check_nonneg("t", t)?;
    let errors = errors_for(profile, opts.two_sided)?;
    let bad_budget = budget(profile, opts.gamma_fail)?;
    let sum_sq: f64 = profile.c.iter().zip(&errors).map(|(c, e)| (c + e) * (c + e)).sum();
    let mut bound = if t == 0.0 {
        TailBound::trivial()
    } else if sum_sq == 0.0 {
        TailBound::impossible()
    } else {
        let factor = if opts.two_valued { 4.0 } else { 1.0 };
        TailBound::from_exponent(factor * t * t / (2.0 * sum_sq))
    };
    bound.variance_term = Some(sum_sq);
    bound.error_terms = errors;
    bound.bad_budget = bad_budget;
    Ok(bound)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BernoulliOptions {
    pub gamma_fail: Option<f64>,
    /// Use `V/C^2 phi(Ct/V)` instead of `t^2/(2V + 2Ct/3)`.
    pub bennett: bool,
    /// Variables with a dominant outcome of probability `>= 1 - p_k`:
    /// `V = sum p_k (c_k + e_k/(1 - p_k))^2`.
    pub asymmetric: bool,
    /// `P(B)` for monotone `f` and good event: the value is divided by `1 - P(B)`.
    pub monotone_bad_prob: Option<f64>,
    pub two_sided: bool,
}

/// Bernstein/Bennett-type typical bounded differences bound for 0-1 (or
/// asymmetric) variables.
pub fn tbdi_bernoulli_bound(
    profile: &LipschitzProfile,
    t: f64,
    opts: &BernoulliOptions,
) -> Result<TailBound, BoundError> {
    profile.validate()?;
    check_nonneg("t", t)?;
    let p = profile.p.as_ref().ok_or(BoundError::MissingP)?;
    let errors = errors_for(profile, opts.two_sided)?;
    let bad_budget = budget(profile, opts.gamma_fail)?;
    if let Some(pb) = opts.monotone_bad_prob {
        if !(0.0..1.0).contains(&pb) {
            return Err(BoundError::BadProbability(pb));
        }
    }

    let max_step = profile
        .c
        .iter()
        .zip(&errors)
        .map(|(c, e)| c + e)
        .fold(0.0_f64, f64::max);
    let mut variance = 0.0;
    for k in 0..profile.len() {
        let (c, e, pk) = (profile.c[k], errors[k], p[k]);
        if opts.asymmetric {
            if pk >= 1.0 {
                return Err(BoundError::AsymmetricUnitP { k });
            }
            let step = c + e / (1.0 - pk);
            variance += pk * step * step;
        } else {
            variance += (1.0 - pk) * pk * (c + e) * (c + e);
        }
    }

    let exponent = if t == 0.0 {
        0.0
    } else if opts.bennett {
        bennett_exponent(variance, max_step, t)
    } else {
        bernstein_exponent(variance, max_step, t)
    };
    let exponent = match opts.monotone_bad_prob {
        Some(pb) if exponent.is_finite() => exponent + (1.0 - pb).ln(),
        _ => exponent,
    };
    let mut bound = TailBound::from_exponent(exponent);
    bound.variance_term = Some(variance);
    bound.max_term = Some(max_step);
    bound.error_terms = errors;
    bound.bad_budget = bad_budget;
    Ok(bound)
}

/// Error terms `e_k = 2 gamma_k (d_k - c_k) / q_k` for the two-sided
/// typical Lipschitz condition.
pub fn two_sided_error(profile: &LipschitzProfile) -> Result<Vec<f64>, BoundError> {
    profile.validate()?;
    let q = profile.q.as_ref().ok_or(BoundError::MissingQ)?;
    Ok((0..profile.len())
        .map(|k| 2.0 * profile.gamma[k] * (profile.d[k] - profile.c[k]) / q[k])
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBound {
    pub bound: TailBound,
    /// Additive shift of the threshold: the bound applies to `f >= mu + t + shift`.
    pub shift: f64,
}

/// Bounded differences with truncation: the Lipschitz data need only hold on
/// a product of local good sets, at the cost of shifting the threshold by
/// `s * P(X not in Gamma)` (or nothing when `monotone` holds).
pub fn truncation_bound(
    profile: &LipschitzProfile,
    t: f64,
    s: f64,
    gamma_fail: f64,
    monotone: bool,
) -> Result<TruncatedBound, BoundError> {
    check_nonneg("s", s)?;
    let bound = tbdi_bound(
        profile,
        t,
        &TbdiOptions { gamma_fail: Some(gamma_fail), ..Default::default() },
    )?;
    let shift = if monotone { 0.0 } else { s * gamma_fail };
    Ok(TruncatedBound { bound, shift })
}

/// Precomputed per-query-set aggregates for adaptive exposure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryAggregate {
    /// `sum_{k in Q} (c_k + e_k)^2` per query set (or `sum c_k^2` for the
    /// classical variant).
    pub sums: Vec<f64>,
    /// `sum_{k in Q} (1 - p_k) p_k (c_k + e_k)^2` per query set.
    #[serde(default)]
    pub variance_sums: Vec<f64>,
    /// `max_{k in Q} (c_k + e_k)` per query set.
    #[serde(default)]
    pub maxima: Vec<f64>,
}

impl QueryAggregate {
    pub fn from_sums(sums: Vec<f64>) -> Self {
        QueryAggregate { sums, variance_sums: Vec::new(), maxima: Vec::new() }
    }

    fn validate(&self) -> Result<(), BoundError> {
        if self.sums.is_empty() && self.variance_sums.is_empty() {
            return Err(BoundError::EmptyFamily);
        }
        for &v in self.sums.iter().chain(&self.variance_sums).chain(&self.maxima) {
            check_nonneg("query aggregate", v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateVariant {
    Bdi,
    Tbdi { two_valued: bool },
    TbdiBernoulli { bennett: bool },
}

fn max_of(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::max)
}

/// Evaluates a base bound with `sum_{k in [N]}` replaced by the maximum
/// per-query-set sum and `max_{k in [N]}` by the maximum per-query-set maximum.
pub fn dynamic_aggregate_bound(
    agg: &QueryAggregate,
    t: f64,
    variant: AggregateVariant,
) -> Result<TailBound, BoundError> {
    agg.validate()?;
    check_nonneg("t", t)?;
    let mut bound = match variant {
        AggregateVariant::Bdi | AggregateVariant::Tbdi { .. } => {
            let sum = max_of(&agg.sums).ok_or(BoundError::MissingAggregate("sums"))?;
            let exponent = if t == 0.0 {
                0.0
            } else if sum == 0.0 {
                f64::INFINITY
            } else {
                match variant {
                    AggregateVariant::Bdi => 2.0 * t * t / sum,
                    AggregateVariant::Tbdi { two_valued } => {
                        let factor = if two_valued { 4.0 } else { 1.0 };
                        factor * t * t / (2.0 * sum)
                    }
                    AggregateVariant::TbdiBernoulli { .. } => unreachable!(),
                }
            };
            let mut b = TailBound::from_exponent(exponent);
            b.variance_term = Some(sum);
            b
        }
        AggregateVariant::TbdiBernoulli { bennett } => {
            let v = max_of(&agg.variance_sums)
                .ok_or(BoundError::MissingAggregate("variance_sums"))?;
            let c = max_of(&agg.maxima).ok_or(BoundError::MissingAggregate("maxima"))?;
            let exponent = if bennett {
                bennett_exponent(v, c, t)
            } else {
                bernstein_exponent(v, c, t)
            };
            let mut b = TailBound::from_exponent(exponent);
            b.variance_term = Some(v);
            b.max_term = Some(c);
            b
        }
    };
    bound.bad_budget = None;
    Ok(bound)
}

/// Upper bound `exp(-mu^2 / (mu + 2 Delta))` on the probability that a sum of
/// positively correlated indicators with mean `mu` and overlap term `Delta`
/// vanishes.
pub fn janson_zero_bound(mu: f64, delta: f64) -> Result<f64, BoundError> {
    check_nonneg("mu", mu)?;
    check_nonneg("delta", delta)?;
    if mu == 0.0 {
        return Ok(1.0);
    }
    Ok((-(mu * mu) / (mu + 2.0 * delta)).exp().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn phi_reference_values() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert!(close(phi(std::f64::consts::E - 1.0).unwrap(), 1.0, 1e-14));
        // 2 ln 2 - 1
        assert!(close(phi(1.0).unwrap(), 0.386_294_361_119_890_6, 1e-14));
        assert!(close(phi(10.0).unwrap(), 16.376_848_000_782_07, 1e-13));
        assert!(phi(-0.5).is_err());
    }

    #[test]
    fn phi_small_argument_is_accurate() {
        // the series and the closed form agree where both are accurate
        for &x in &[1e-4, 2e-4, 5e-4] {
            let direct = (1.0 + x) * f64::ln_1p(x) - x;
            assert!(close(phi(x).unwrap(), direct, 1e-9));
        }
        let x = 1e-8;
        assert!(close(phi(x).unwrap(), x * x / 2.0, 1e-7));
    }

    #[test]
    fn bdi_plug_in() {
        let n = 25;
        let p = LipschitzProfile::worst_case(vec![1.0; n]).unwrap();
        let b = bdi_bound(&p, (n as f64).sqrt()).unwrap();
        assert!(close(b.exponent, 2.0, 1e-14));
        assert!(close(b.value, (-2.0f64).exp(), 1e-14));

        let p = LipschitzProfile::worst_case(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = bdi_bound(&p, 10.0).unwrap();
        assert!(close(b.exponent, 200.0 / 30.0, 1e-14));
        assert_eq!(bdi_bound(&p, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn bdi_constant_function() {
        let p = LipschitzProfile::worst_case(vec![0.0; 3]).unwrap();
        assert_eq!(bdi_bound(&p, 1.0).unwrap().value, 0.0);
        assert_eq!(bdi_bound(&p, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn tbdi_hand_example() {
        let p = LipschitzProfile::new(vec![1.0, 1.0], vec![3.0, 5.0], vec![0.5, 0.25]).unwrap();
        let b = tbdi_bound(&p, 4.0, &TbdiOptions::default()).unwrap();
        assert_eq!(b.error_terms, vec![1.0, 1.0]);
        assert!(close(b.exponent, 1.0, 1e-14));
        assert!(close(b.value, (-1.0f64).exp(), 1e-14));
    }

    #[test]
    fn tbdi_reduces_to_bdi() {
        let c = vec![0.5, 1.5, 2.0];
        let p = LipschitzProfile::new(c.clone(), c.clone(), vec![0.1, 0.7, 1.0]).unwrap();
        let classical = bdi_bound(&p, 2.5).unwrap();
        let plain = tbdi_bound(&p, 2.5, &TbdiOptions::default()).unwrap();
        assert!(close(plain.exponent * 4.0, classical.exponent, 1e-12));
        let two = tbdi_bound(&p, 2.5, &TbdiOptions { two_valued: true, ..Default::default() })
            .unwrap();
        assert!(close(two.exponent, classical.exponent, 1e-12));
    }

    #[test]
    fn triangle_error_term_is_small() {
        // c = codegree threshold, d = n, gamma = 1/n
        for &n in &[100.0f64, 1000.0, 1e5] {
            let delta = (2.0 * n * n.powf(-0.4) * n.powf(-0.4)).max(n.powf(0.1));
            let p = LipschitzProfile::uniform(1, delta, n, 1.0 / n).unwrap();
            let e = p.error_terms()[0];
            assert!(e < 1.0 && e < delta);
        }
    }

    #[test]
    fn budget_is_linear_and_clamped() {
        let p = LipschitzProfile::new(vec![1.0; 2], vec![2.0; 2], vec![0.5, 0.25]).unwrap();
        let b = tbdi_bound(&p, 1.0, &TbdiOptions { gamma_fail: Some(0.01), ..Default::default() })
            .unwrap();
        assert!(close(b.bad_budget.unwrap(), 0.06, 1e-14));
        let b = tbdi_bound(&p, 1.0, &TbdiOptions { gamma_fail: Some(0.5), ..Default::default() })
            .unwrap();
        assert_eq!(b.bad_budget.unwrap(), 1.0);
    }

    #[test]
    fn bernoulli_sum_of_coins_is_bernstein() {
        let n = 50;
        let pr = 0.2;
        let p = LipschitzProfile::worst_case(vec![1.0; n]).unwrap().with_p(vec![pr; n]).unwrap();
        let t = 4.0;
        let b = tbdi_bernoulli_bound(&p, t, &BernoulliOptions::default()).unwrap();
        let v = n as f64 * pr * (1.0 - pr);
        assert!(close(b.variance_term.unwrap(), v, 1e-12));
        assert!(close(b.exponent, t * t / (2.0 * v + 2.0 * t / 3.0), 1e-12));
    }

    #[test]
    fn bernoulli_degenerate_variance() {
        let p = LipschitzProfile::worst_case(vec![2.0, 1.0])
            .unwrap()
            .with_p(vec![0.0, 1.0])
            .unwrap();
        let b = tbdi_bernoulli_bound(&p, 3.0, &BernoulliOptions::default()).unwrap();
        assert_eq!(b.variance_term, Some(0.0));
        assert!(close(b.exponent, 3.0 * 3.0 / (2.0 * 2.0), 1e-14));
        let b = tbdi_bernoulli_bound(&p, 0.0, &BernoulliOptions::default()).unwrap();
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn bennett_dominates_at_reference_point() {
        let bennett = bennett_exponent(1.0, 1.0, 10.0);
        let bernstein = bernstein_exponent(1.0, 1.0, 10.0);
        assert!(close(bennett, 16.376_848_000_782_07, 1e-12));
        assert!(close(bernstein, 100.0 / (2.0 + 20.0 / 3.0), 1e-14));
        assert!(bennett >= bernstein);
    }

    #[test]
    fn asymmetric_rejects_unit_p() {
        let p = LipschitzProfile::worst_case(vec![1.0, 1.0])
            .unwrap()
            .with_p(vec![0.3, 1.0])
            .unwrap();
        let opts = BernoulliOptions { asymmetric: true, ..Default::default() };
        assert_eq!(
            tbdi_bernoulli_bound(&p, 1.0, &opts),
            Err(BoundError::AsymmetricUnitP { k: 1 })
        );
    }

    #[test]
    fn asymmetric_variance() {
        let p = LipschitzProfile::new(vec![1.0], vec![3.0], vec![0.5])
            .unwrap()
            .with_p(vec![0.5])
            .unwrap();
        let opts = BernoulliOptions { asymmetric: true, ..Default::default() };
        let b = tbdi_bernoulli_bound(&p, 1.0, &opts).unwrap();
        // e = 1, step = 1 + 1/0.5 = 3, V = 0.5 * 9
        assert!(close(b.variance_term.unwrap(), 4.5, 1e-14));
        assert!(close(b.max_term.unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn monotone_division() {
        let p = LipschitzProfile::worst_case(vec![1.0; 10]).unwrap().with_p(vec![0.5; 10]).unwrap();
        let base = tbdi_bernoulli_bound(&p, 3.0, &BernoulliOptions::default()).unwrap();
        let opts = BernoulliOptions { monotone_bad_prob: Some(0.2), ..Default::default() };
        let mon = tbdi_bernoulli_bound(&p, 3.0, &opts).unwrap();
        assert!(close(mon.value, base.value / 0.8, 1e-12));
        let opts = BernoulliOptions { monotone_bad_prob: Some(1.0), ..Default::default() };
        assert!(tbdi_bernoulli_bound(&p, 3.0, &opts).is_err());
    }

    #[test]
    fn two_sided_errors() {
        let p = LipschitzProfile::new(vec![2.0; 3], vec![2.0; 3], vec![0.3; 3])
            .unwrap()
            .with_q(vec![0.5; 3])
            .unwrap();
        assert_eq!(two_sided_error(&p).unwrap(), vec![0.0; 3]);

        let p = LipschitzProfile::new(vec![1.0, 4.0], vec![2.0, 5.0], vec![0.25, 0.1])
            .unwrap()
            .with_q(vec![0.5, 0.2])
            .unwrap();
        let e = two_sided_error(&p).unwrap();
        assert!(close(e[0], 1.0, 1e-15) && close(e[1], 1.0, 1e-15));

        let n: f64 = 30.0;
        let p = LipschitzProfile::new(vec![10.0], vec![n * n], vec![n.powi(-4)])
            .unwrap()
            .with_q(vec![n.powi(-2)])
            .unwrap();
        assert!(two_sided_error(&p).unwrap()[0] <= 2.0);

        let missing = LipschitzProfile::worst_case(vec![1.0]).unwrap();
        assert_eq!(two_sided_error(&missing), Err(BoundError::MissingQ));
    }

    #[test]
    fn truncation_shift() {
        let p = LipschitzProfile::new(vec![1.0; 4], vec![2.0; 4], vec![0.5; 4]).unwrap();
        let r = truncation_bound(&p, 2.0, 100.0, 1e-3, false).unwrap();
        assert!(close(r.shift, 0.1, 1e-14));
        let r = truncation_bound(&p, 2.0, 100.0, 1e-3, true).unwrap();
        assert_eq!(r.shift, 0.0);
        let r = truncation_bound(&p, 2.0, 100.0, 0.0, false).unwrap();
        let plain = tbdi_bound(&p, 2.0, &TbdiOptions::default()).unwrap();
        assert_eq!(r.shift, 0.0);
        assert_eq!(r.bound.exponent, plain.exponent);
    }

    #[test]
    fn aggregate_examples() {
        let agg = QueryAggregate::from_sums(vec![4.0, 9.0]);
        let b = dynamic_aggregate_bound(&agg, 3.0, AggregateVariant::Tbdi { two_valued: false })
            .unwrap();
        assert!(close(b.exponent, 0.5, 1e-14));

        let p = LipschitzProfile::worst_case(vec![1.0, 2.0]).unwrap();
        let full = QueryAggregate::from_sums(vec![5.0]);
        let a = dynamic_aggregate_bound(&full, 1.5, AggregateVariant::Bdi).unwrap();
        assert!(close(a.exponent, bdi_bound(&p, 1.5).unwrap().exponent, 1e-14));

        assert_eq!(
            dynamic_aggregate_bound(&QueryAggregate::from_sums(vec![]), 1.0, AggregateVariant::Bdi),
            Err(BoundError::EmptyFamily)
        );
    }

    #[test]
    fn janson_examples() {
        assert!(close(janson_zero_bound(3.0, 0.0).unwrap(), (-3.0f64).exp(), 1e-15));
        assert_eq!(janson_zero_bound(0.0, 5.0).unwrap(), 1.0);
        assert!(close(janson_zero_bound(4.0, 2.0).unwrap(), (-2.0f64).exp(), 1e-15));
        assert!(janson_zero_bound(-1.0, 0.0).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(
            LipschitzProfile::new(vec![2.0], vec![1.0], vec![0.5]),
            Err(BoundError::CExceedsD { .. })
        ));
        assert!(matches!(
            LipschitzProfile::new(vec![1.0], vec![1.0], vec![0.0]),
            Err(BoundError::Gamma { .. })
        ));
        assert!(matches!(
            LipschitzProfile::new(vec![1.0, 1.0], vec![1.0], vec![0.5, 0.5]),
            Err(BoundError::Length { .. })
        ));
    }
}
