//! Exact verification of the tail bounds and martingale lemmas against
//! enumerated probabilities.

use serde::{Deserialize, Serialize};

use super::model::ExactModel;
use super::space::{FiniteProductSpace, SpaceError, SpaceLimits};
use crate::bounds::{
    bdi_bound, bennett_exponent, bernstein_exponent, tbdi_bernoulli_bound, tbdi_bound,
    BernoulliOptions, LipschitzProfile, TbdiOptions,
};

/// Slack when counting `f >= threshold`: outcomes within this distance count.
pub const EVENT_SLACK: f64 = 1e-9;
/// Slack when comparing an exact probability against a bound.
pub const COMPARE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleTrace {
    pub y: Vec<f64>,
    pub stop: usize,
    /// First `k` in `1..=N` for which `B_{k-1}` holds.
    pub bad_at: Option<usize>,
}

impl ExactModel<'_> {
    pub fn trace(&self, flat: usize) -> MartingaleTrace {
        let stop = self.stopping_time(flat);
        let n = self.coords();
        MartingaleTrace {
            y: self.doob_path(flat),
            stop,
            bad_at: (stop < n).then_some(stop + 1),
        }
    }
}

pub fn doob_trace(space: &FiniteProductSpace, outcome: &[usize]) -> Result<MartingaleTrace, SpaceError> {
    let flat = space.flat_index(outcome)?;
    let model = ExactModel::build(space, &SpaceLimits::default())?;
    Ok(model.trace(flat))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzMode {
    /// `c_k` over pairs with `x in Gamma`.
    OneSided,
    /// `c_k` over pairs with both points in `Gamma`.
    TwoSided,
    /// Pairs restricted to the product of local good sets; `c_k` as one-sided.
    Truncated,
}

/// Smallest `(c, d)` satisfying the requested Lipschitz condition.
pub fn minimal_lipschitz(
    space: &FiniteProductSpace,
    two_sided: bool,
) -> Result<(Vec<f64>, Vec<f64>), SpaceError> {
    let model = ExactModel::build(space, &SpaceLimits::default())?;
    let mode = if two_sided { LipschitzMode::TwoSided } else { LipschitzMode::OneSided };
    Ok(model.lipschitz(mode))
}

impl ExactModel<'_> {
    fn in_local_box(&self) -> Vec<bool> {
        let n = self.coords();
        let mut x = vec![0usize; n];
        (0..self.outcomes())
            .map(|flat| {
                self.space.decode(flat, &mut x);
                x.iter().enumerate().all(|(k, &v)| self.space.locally_good(k, v))
            })
            .collect()
    }

    /// Visits every unordered pair of outcomes differing in exactly one
    /// coordinate as `(k, a, b)` with `a < b`.
    fn for_each_pair(&self, mut visit: impl FnMut(usize, usize, usize)) {
        let n = self.coords();
        let mut x = vec![0usize; n];
        let strides: Vec<usize> = (0..n).map(|k| self.suffix[k + 1]).collect();
        for a in 0..self.outcomes() {
            self.space.decode(a, &mut x);
            for k in 0..n {
                for v in x[k] + 1..self.sizes[k] {
                    visit(k, a, a + (v - x[k]) * strides[k]);
                }
            }
        }
    }

    pub fn lipschitz(&self, mode: LipschitzMode) -> (Vec<f64>, Vec<f64>) {
        let n = self.coords();
        let mut c = vec![0.0f64; n];
        let mut d = vec![0.0f64; n];
        let boxed = match mode {
            LipschitzMode::Truncated => Some(self.in_local_box()),
            _ => None,
        };
        self.for_each_pair(|k, a, b| {
            if let Some(boxed) = &boxed {
                if !(boxed[a] && boxed[b]) {
                    return;
                }
            }
            let diff = (self.f[a] - self.f[b]).abs();
            d[k] = d[k].max(diff);
            let typical = match mode {
                LipschitzMode::TwoSided => self.good[a] && self.good[b],
                _ => self.good[a] || self.good[b],
            };
            if typical {
                c[k] = c[k].max(diff);
            }
        });
        (c, d)
    }

    fn monotone_f(&self, increasing: bool) -> bool {
        let mut ok = true;
        self.for_each_pair(|_, a, b| {
            // b has the larger value in the changed coordinate
            let step = self.f[b] - self.f[a];
            if (increasing && step < -1e-12) || (!increasing && step > 1e-12) {
                ok = false;
            }
        });
        ok
    }

    fn monotone_good(&self, increasing: bool) -> bool {
        let mut ok = true;
        self.for_each_pair(|_, a, b| {
            let broken = if increasing {
                self.good[a] && !self.good[b]
            } else {
                self.good[b] && !self.good[a]
            };
            if broken {
                ok = false;
            }
        });
        ok
    }

    /// `f(x) >= f(x~)` whenever they differ only in a coordinate with
    /// `x_k` outside and `x~_k` inside the local good set.
    fn truncation_monotone(&self) -> bool {
        let mut ok = true;
        let n = self.coords();
        let mut x = vec![0usize; n];
        self.for_each_pair(|k, a, b| {
            self.space.decode(a, &mut x);
            let va = x[k];
            let vb = va + (b - a) / self.suffix[k + 1];
            let (ga, gb) = (self.space.locally_good(k, va), self.space.locally_good(k, vb));
            if !ga && gb && self.f[a] < self.f[b] - 1e-12 {
                ok = false;
            }
            if ga && !gb && self.f[b] < self.f[a] - 1e-12 {
                ok = false;
            }
        });
        ok
    }

    /// `P(f >= threshold [and not B])`.
    fn tail(&self, threshold: f64, bad: Option<&[bool]>) -> f64 {
        (0..self.outcomes())
            .filter(|&i| self.f[i] >= threshold - EVENT_SLACK)
            .filter(|&i| bad.is_none_or(|b| !b[i]))
            .map(|i| self.prob[i])
            .fold(0.0, |a, p| a + p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: &str, exact: f64, bound: f64) -> Self {
        BoundCheck { name: name.to_string(), exact, bound, holds: exact <= bound + COMPARE_SLACK }
    }
}

/// Exact probabilities of one instance and every applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub t: f64,
    pub mean: f64,
    pub range: f64,
    pub fail_probability: f64,
    pub bad_probability: f64,
    pub budget: f64,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub checks: Vec<BoundCheck>,
}

impl ExactReport {
    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn exact_tbdi_check(space: &FiniteProductSpace, t: f64) -> Result<ExactReport, SpaceError> {
    let model = ExactModel::build(space, &SpaceLimits::default())?;
    Ok(model.tbdi_report(t))
}

fn value_of(result: Result<crate::bounds::TailBound, crate::bounds::BoundError>) -> f64 {
    result.expect("profile built from a validated space").value
}

impl ExactModel<'_> {
    pub fn tbdi_report(&self, t: f64) -> ExactReport {
        let space = self.space;
        let n = self.coords();
        let mu = self.mean();
        let range = self.max_f() - self.min_f();
        let fail = self.fail_probability();
        let bad: Vec<bool> = (0..self.outcomes()).map(|i| self.in_bad_event(i)).collect();
        let p_bad: f64 = (0..self.outcomes()).filter(|&i| bad[i]).map(|i| self.prob[i]).fold(0.0, |a, p| a + p);
        let escaped: f64 =
            (0..self.outcomes()).filter(|&i| !bad[i] && !self.good[i]).map(|i| self.prob[i]).fold(0.0, |a, p| a + p);
        let joint = self.tail(mu + t, Some(&bad));
        let tail = self.tail(mu + t, None);
        let gamma = space.gamma.clone();

        let (c, d) = self.lipschitz(LipschitzMode::OneSided);
        let profile = LipschitzProfile::new(c.clone(), d.clone(), gamma.clone())
            .expect("c <= d by construction");
        let budget = profile.inverse_gamma_sum() * fail;

        let mut checks = vec![
            BoundCheck::new("bad_budget", p_bad, budget),
            BoundCheck::new("complement_in_good", escaped, 0.0),
        ];
        let worst = LipschitzProfile::worst_case(d.clone()).expect("d >= 0");
        checks.push(BoundCheck::new("bdi", tail, value_of(bdi_bound(&worst, t))));
        checks.push(BoundCheck::new(
            "tbdi",
            joint,
            value_of(tbdi_bound(&profile, t, &TbdiOptions::default())),
        ));

        let binary = space.is_binary();
        let p_one: Vec<f64> = space.weights.iter().map(|w| w[w.len() - 1]).collect();
        let p_asym: Vec<f64> = space
            .weights
            .iter()
            .map(|w| (1.0 - w.iter().copied().fold(0.0, f64::max)).clamp(0.0, 1.0))
            .collect();
        let q: Vec<f64> = space.weights.iter().map(|w| w.iter().copied().fold(1.0, f64::min)).collect();

        if binary {
            let two = TbdiOptions { two_valued: true, ..Default::default() };
            checks.push(BoundCheck::new("tbdi_two_valued", joint, value_of(tbdi_bound(&profile, t, &two))));
            let with_p = profile.clone().with_p(p_one.clone()).expect("weights are probabilities");
            for (name, bennett) in [("bernstein", false), ("bennett", true)] {
                let opts = BernoulliOptions { bennett, ..Default::default() };
                checks.push(BoundCheck::new(name, joint, value_of(tbdi_bernoulli_bound(&with_p, t, &opts))));
            }
            let classical = worst.clone().with_p(p_one.clone()).expect("weights are probabilities");
            checks.push(BoundCheck::new(
                "bernstein_classical",
                tail,
                value_of(tbdi_bernoulli_bound(&classical, t, &BernoulliOptions::default())),
            ));
        }

        let asym = profile.clone().with_p(p_asym.clone()).expect("weights are probabilities");
        for (name, bennett) in [("asymmetric_bernstein", false), ("asymmetric_bennett", true)] {
            let opts = BernoulliOptions { bennett, asymmetric: true, ..Default::default() };
            checks.push(BoundCheck::new(name, joint, value_of(tbdi_bernoulli_bound(&asym, t, &opts))));
        }

        let same_direction = (self.monotone_f(true) && self.monotone_good(true))
            || (self.monotone_f(false) && self.monotone_good(false));
        if same_direction && p_bad < 1.0 {
            checks.push(BoundCheck::new("monotone_harris", tail, joint / (1.0 - p_bad)));
            if binary {
                let with_p = profile.clone().with_p(p_one.clone()).expect("weights are probabilities");
                let opts = BernoulliOptions { monotone_bad_prob: Some(p_bad), ..Default::default() };
                checks.push(BoundCheck::new(
                    "monotone_bernstein",
                    tail,
                    value_of(tbdi_bernoulli_bound(&with_p, t, &opts)),
                ));
            }
        }

        if q.iter().all(|&v| v > 0.0) {
            let (c2, d2) = self.lipschitz(LipschitzMode::TwoSided);
            let two_sided = LipschitzProfile::new(c2, d2, gamma.clone())
                .expect("c <= d by construction")
                .with_q(q.clone())
                .expect("positive weights");
            let opts = TbdiOptions { two_sided: true, ..Default::default() };
            checks.push(BoundCheck::new("two_sided_tbdi", joint, value_of(tbdi_bound(&two_sided, t, &opts))));
            if binary {
                let opts = TbdiOptions { two_sided: true, two_valued: true, ..Default::default() };
                checks.push(BoundCheck::new(
                    "two_sided_two_valued",
                    joint,
                    value_of(tbdi_bound(&two_sided, t, &opts)),
                ));
                let with_p = two_sided.clone().with_p(p_one.clone()).expect("weights are probabilities");
                for (name, bennett) in [("two_sided_bernstein", false), ("two_sided_bennett", true)] {
                    let opts = BernoulliOptions { bennett, two_sided: true, ..Default::default() };
                    checks.push(BoundCheck::new(name, joint, value_of(tbdi_bernoulli_bound(&with_p, t, &opts))));
                }
            }
            let asym = two_sided.with_p(p_asym.clone()).expect("weights are probabilities");
            let opts = BernoulliOptions { two_sided: true, asymmetric: true, ..Default::default() };
            checks.push(BoundCheck::new(
                "two_sided_asymmetric",
                joint,
                value_of(tbdi_bernoulli_bound(&asym, t, &opts)),
            ));
        }

        let boxed = self.in_local_box();
        let inside = (0..self.outcomes()).all(|i| !self.good[i] || boxed[i]);
        if inside {
            let (ct, dt) = self.lipschitz(LipschitzMode::Truncated);
            let truncated = LipschitzProfile::new(ct.clone(), dt, gamma.clone()).expect("c <= d by construction");
            let shift = range * fail;
            let bound = value_of(tbdi_bound(&truncated, t, &TbdiOptions::default()));
            checks.push(BoundCheck::new("truncation", self.tail(mu + t + shift, Some(&bad)), bound));
            let monotone = self.truncation_monotone();
            if monotone {
                checks.push(BoundCheck::new("truncation_monotone", joint, bound));
            }
            if (0..self.outcomes()).all(|i| self.good[i] == boxed[i]) {
                let shift = if monotone { 0.0 } else { shift };
                let threshold = mu + t + shift;
                let exact: f64 = (0..self.outcomes())
                    .filter(|&i| self.good[i] && self.f[i] >= threshold - EVENT_SLACK)
                    .map(|i| self.prob[i])
                    .fold(0.0, |a, p| a + p);
                let classical = LipschitzProfile::worst_case(ct).expect("c >= 0");
                checks.push(BoundCheck::new("truncation_product", exact, value_of(bdi_bound(&classical, t))));
            }
        }

        debug_assert_eq!(c.len(), n);
        ExactReport { t, mean: mu, range, fail_probability: fail, bad_probability: p_bad, budget, c, d, checks }
    }
}

/// Conditional increment data of the stopped martingale for one
/// `F_{k-1}`-measurable cell.
#[derive(Debug, Clone, Copy, PartialEq)]
struct StepData {
    lower: f64,
    upper: f64,
    variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    /// `"differences"` (via `S_k`) or `"variances"` (with `V_k`, `C_k`).
    pub lemma: String,
    pub s: Option<f64>,
    pub v: Option<f64>,
    pub c: Option<f64>,
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub t: f64,
    pub checks: Vec<LemmaCheck>,
    /// Outcomes (with positive probability) where `V_k > S_k / 4` for some `k`.
    pub variance_violations: usize,
    /// Largest `V_k / S_k` seen with `S_k > 0`.
    pub max_variance_ratio: f64,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.variance_violations == 0 && self.checks.iter().all(|c| c.holds)
    }
}

/// Pathwise quantities of the stopped Doob martingale.
pub struct StoppedMartingale<'m, 'a> {
    model: &'m ExactModel<'a>,
    steps: Vec<Vec<StepData>>,
}

/// One path: `m[k]`, `s[k]`, `v[k]`, `c[k]` for `k = 0..=N` (index 0 unused
/// for `s`, `v`, `c`).
#[derive(Debug, Clone, PartialEq)]
pub struct MartingalePath {
    pub m: Vec<f64>,
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub c: Vec<f64>,
}

impl<'m, 'a> StoppedMartingale<'m, 'a> {
    pub fn new(model: &'m ExactModel<'a>) -> Self {
        let n = model.coords();
        let mut steps = Vec::with_capacity(n);
        for k in 1..=n {
            let size = model.sizes[k - 1];
            let w = &model.space.weights[k - 1];
            let level: Vec<StepData> = (0..model.doob[k - 1].len())
                .map(|i| {
                    if model.stopped[k - 1][i] {
                        return StepData { lower: 0.0, upper: 0.0, variance: 0.0 };
                    }
                    let base = model.doob[k - 1][i];
                    let mut step = StepData { lower: f64::INFINITY, upper: f64::NEG_INFINITY, variance: 0.0 };
                    for z in 0..size {
                        if w[z] <= 0.0 {
                            continue;
                        }
                        let inc = model.doob[k][i * size + z] - base;
                        step.lower = step.lower.min(inc);
                        step.upper = step.upper.max(inc);
                        step.variance += w[z] * inc * inc;
                    }
                    step
                })
                .collect();
            steps.push(level);
        }
        StoppedMartingale { model, steps }
    }

    pub fn path(&self, flat: usize) -> MartingalePath {
        let model = self.model;
        let n = model.coords();
        let mut path = MartingalePath {
            m: vec![model.mean(); n + 1],
            s: vec![0.0; n + 1],
            v: vec![0.0; n + 1],
            c: vec![f64::NEG_INFINITY; n + 1],
        };
        for k in 1..=n {
            let i = model.prefix(flat, k - 1);
            let step = self.steps[k - 1][i];
            let width = step.upper - step.lower;
            path.s[k] = path.s[k - 1] + width * width;
            path.v[k] = path.v[k - 1] + step.variance;
            path.c[k] = path.c[k - 1].max(step.upper);
            path.m[k] = if model.stopped[k - 1][i] { path.m[k - 1] } else { model.doob[k][model.prefix(flat, k)] };
        }
        path
    }

    fn positive_outcomes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.model.outcomes()).filter(|&i| self.model.prob[i] > 0.0)
    }

    /// `P(M_k >= M_0 + t and S_k <= S for some k)`.
    pub fn differences_event(&self, t: f64, s: f64) -> f64 {
        let limit = s * (1.0 + 1e-12) + 1e-12;
        self.positive_outcomes()
            .filter(|&i| {
                let p = self.path(i);
                (1..p.m.len()).any(|k| p.m[k] >= p.m[0] + t - EVENT_SLACK && p.s[k] <= limit)
            })
            .map(|i| self.model.prob[i])
            .fold(0.0, |a, p| a + p)
    }

    /// `P(M_k >= M_0 + t, V_k <= V and C_k <= C for some k)`.
    pub fn variances_event(&self, t: f64, v: f64, c: f64) -> f64 {
        let (lv, lc) = (v * (1.0 + 1e-12) + 1e-12, c * (1.0 + 1e-12) + 1e-12);
        self.positive_outcomes()
            .filter(|&i| {
                let p = self.path(i);
                (1..p.m.len()).any(|k| p.m[k] >= p.m[0] + t - EVENT_SLACK && p.v[k] <= lv && p.c[k] <= lc)
            })
            .map(|i| self.model.prob[i])
            .fold(0.0, |a, p| a + p)
    }
}

fn quantiles(mut values: Vec<f64>) -> Vec<f64> {
    values.retain(|v| *v > 0.0 && v.is_finite());
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|q| values[((values.len() - 1) as f64 * q).round() as usize])
        .collect();
    out.dedup();
    out
}

pub fn martingale_lemma_check(space: &FiniteProductSpace, t: f64) -> Result<LemmaReport, SpaceError> {
    let model = ExactModel::build(space, &SpaceLimits::default())?;
    Ok(model.lemma_report(t))
}

impl ExactModel<'_> {
    pub fn lemma_report(&self, t: f64) -> LemmaReport {
        let mart = StoppedMartingale::new(self);
        let n = self.coords();
        let mut finals_s = Vec::new();
        let mut finals_v = Vec::new();
        let mut finals_c = Vec::new();
        let mut variance_violations = 0;
        let mut max_ratio = 0.0f64;
        for i in mart.positive_outcomes() {
            let p = mart.path(i);
            let mut broken = false;
            for k in 1..=n {
                if p.v[k] > p.s[k] / 4.0 + 1e-12 * (1.0 + p.s[k]) {
                    broken = true;
                }
                if p.s[k] > 0.0 {
                    max_ratio = max_ratio.max(p.v[k] / p.s[k]);
                }
            }
            if broken {
                variance_violations += 1;
            }
            finals_s.push(p.s[n]);
            finals_v.push(p.v[n]);
            finals_c.push(p.c[n]);
        }

        let mut checks = Vec::new();
        for s in quantiles(finals_s) {
            let exact = mart.differences_event(t, s);
            let bound = (-2.0 * t * t / s).exp();
            checks.push(LemmaCheck {
                lemma: "differences".into(),
                s: Some(s),
                v: None,
                c: None,
                exact,
                bound,
                holds: exact <= bound + COMPARE_SLACK,
            });
        }
        for (v, c) in quantiles(finals_v).into_iter().zip(quantiles(finals_c)) {
            let exact = mart.variances_event(t, v, c);
            let bennett = (-bennett_exponent(v, c, t)).exp();
            let bernstein = (-bernstein_exponent(v, c, t)).exp();
            checks.push(LemmaCheck {
                lemma: "variances".into(),
                s: None,
                v: Some(v),
                c: Some(c),
                exact,
                bound: bennett,
                holds: exact <= bennett + COMPARE_SLACK && bennett <= bernstein * (1.0 + 1e-12),
            });
        }
        LemmaReport { t, checks, variance_violations, max_variance_ratio: max_ratio }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcheck::spec::{EventSpec, FnSpec};

    #[test]
    fn sum_of_two_bits_trace() {
        let space = FiniteProductSpace::fair_bits(2, FnSpec::coordinate_sum(2), EventSpec::All, 0.5);
        for (x, y1) in [([0, 0], 0.5), ([1, 0], 1.5), ([1, 1], 1.5), ([0, 1], 0.5)] {
            let tr = doob_trace(&space, &x).unwrap();
            assert_eq!(tr.y, vec![1.0, y1, (x[0] + x[1]) as f64]);
            assert_eq!(tr.bad_at, None);
            assert_eq!(tr.stop, 2);
        }
    }

    #[test]
    fn majority_trace() {
        let space = FiniteProductSpace::fair_bits(3, FnSpec::majority(3), EventSpec::All, 1.0);
        let tr = doob_trace(&space, &[1, 1, 0]).unwrap();
        assert_eq!(tr.y, vec![0.5, 0.75, 1.0, 1.0]);
    }

    #[test]
    fn constant_trace() {
        let space = FiniteProductSpace::fair_bits(4, FnSpec::Const { value: 2.5 }, EventSpec::All, 1.0);
        let tr = doob_trace(&space, &[0, 1, 1, 0]).unwrap();
        assert!(tr.y.iter().all(|&y| y == 2.5));
    }

    #[test]
    fn bad_at_and_stop() {
        // Gamma fails exactly when x_0 = 1: P(not Gamma | F_1) = 1 there.
        let good = EventSpec::InBox { sets: vec![vec![0], vec![0, 1], vec![0, 1]] };
        let space = FiniteProductSpace::fair_bits(3, FnSpec::coordinate_sum(3), good, 0.6);
        let tr = doob_trace(&space, &[1, 0, 1]).unwrap();
        assert_eq!(tr.bad_at, Some(2));
        assert_eq!(tr.stop, 1);
        let tr = doob_trace(&space, &[0, 0, 1]).unwrap();
        assert_eq!(tr.bad_at, None);
        // gamma below P(not Gamma) = 1/2: B_0 holds everywhere
        let mut space = space;
        space.gamma = vec![0.4; 3];
        let tr = doob_trace(&space, &[0, 1, 1]).unwrap();
        assert_eq!((tr.bad_at, tr.stop), (Some(1), 0));
    }

    #[test]
    fn cap_is_enforced() {
        let space = FiniteProductSpace::fair_bits(21, FnSpec::coordinate_sum(21), EventSpec::All, 1.0);
        assert!(matches!(
            doob_trace(&space, &[0; 21]),
            Err(SpaceError::TooLarge { required: 2_097_152, .. })
        ));
    }

    #[test]
    fn lipschitz_of_sum() {
        let space = FiniteProductSpace::fair_bits(5, FnSpec::coordinate_sum(5), EventSpec::All, 1.0);
        let (c, d) = minimal_lipschitz(&space, false).unwrap();
        assert_eq!(c, vec![1.0; 5]);
        assert_eq!(d, vec![1.0; 5]);
    }

    #[test]
    fn lipschitz_with_spike() {
        // f = 3 x1 x2 x3 x4 + sum x_k, Gamma = at most two ones
        let n = 4;
        let spike = FnSpec::Scale {
            factor: 3.0,
            inner: Box::new(FnSpec::Product { factors: (0..n).map(|k| FnSpec::Coord { k }).collect() }),
        };
        let f = FnSpec::Sum { terms: vec![spike, FnSpec::coordinate_sum(n)] };
        let good = EventSpec::AtMost { inner: FnSpec::coordinate_sum(n), bound: 2.0 };
        let space = FiniteProductSpace::fair_bits(n, f, good, 0.5);
        let (c, d) = minimal_lipschitz(&space, false).unwrap();
        // changes touching the all-ones point start from three ones, which is outside Gamma
        assert_eq!(c, vec![1.0; 4]);
        assert_eq!(d, vec![4.0; 4]);
        let (c2, d2) = minimal_lipschitz(&space, true).unwrap();
        assert_eq!(c2, vec![1.0; 4]);
        assert_eq!(d2, d);
    }

    #[test]
    fn everything_good_has_no_bad_event() {
        let space = FiniteProductSpace::new(
            vec![vec![0.25, 0.75], vec![0.5, 0.25, 0.25], vec![0.125, 0.875]],
            FnSpec::coordinate_sum(3),
            EventSpec::All,
            vec![0.1; 3],
        );
        let r = exact_tbdi_check(&space, 0.5).unwrap();
        assert_eq!(r.bad_probability, 0.0);
        assert!(r.holds(), "{:?}", r.violations());
    }

    #[test]
    fn empty_good_event() {
        let space = FiniteProductSpace::fair_bits(3, FnSpec::coordinate_sum(3), EventSpec::Empty, 1.0);
        let r = exact_tbdi_check(&space, 0.0).unwrap();
        assert_eq!(r.bad_probability, 1.0);
        assert_eq!(r.check("tbdi").unwrap().exact, 0.0);
        assert!(r.holds());
    }

    #[test]
    fn sum_of_bits_lemma() {
        for n in 1..=10 {
            let space = FiniteProductSpace::fair_bits(n, FnSpec::coordinate_sum(n), EventSpec::All, 1.0);
            let model = ExactModel::build(&space, &SpaceLimits::default()).unwrap();
            let mart = StoppedMartingale::new(&model);
            let t = n as f64 / 2.0;
            let exact = mart.differences_event(t, n as f64);
            assert!((exact - 0.5f64.powi(n as i32)).abs() < 1e-15);
            assert!(exact <= (-(n as f64) / 2.0).exp());
            assert!(model.lemma_report(t).holds());
        }
    }

    #[test]
    fn constant_martingale_lemma() {
        let space = FiniteProductSpace::fair_bits(3, FnSpec::Const { value: 1.0 }, EventSpec::All, 1.0);
        let model = ExactModel::build(&space, &SpaceLimits::default()).unwrap();
        let mart = StoppedMartingale::new(&model);
        assert_eq!(mart.differences_event(0.1, 1.0), 0.0);
        assert_eq!(mart.variances_event(0.1, 1.0, 1.0), 0.0);
    }
}
