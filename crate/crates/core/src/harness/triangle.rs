use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use super::output::{CsvRow, Report};
use super::{mean_std, HarnessError, TailEstimate};
use crate::bounds::{bdi_bound, tbdi_bernoulli_bound, tbdi_bound, BernoulliOptions, LipschitzProfile, TailBound, TbdiOptions};
use crate::graphs::HostGraph;
use crate::processes::stream_rng;

const STREAM_GNP: u8 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleConfig {
    pub n: usize,
    pub p: f64,
    /// `Delta = max(2 n p^2, n^eps)`.
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub t_rel: f64,
    pub trials: u64,
    pub seed: u64,
}

fn default_eps() -> f64 {
    0.1
}

/// The scalar parts of a `TailBound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub value: f64,
    pub exponent: f64,
    pub variance_term: Option<f64>,
    pub max_term: Option<f64>,
    pub bad_budget: Option<f64>,
}

impl From<&TailBound> for BoundSummary {
    fn from(b: &TailBound) -> Self {
        BoundSummary {
            value: b.value,
            exponent: b.exponent,
            variance_term: b.variance_term,
            max_term: b.max_term,
            bad_budget: b.bad_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub config: TriangleConfig,
    pub pairs: usize,
    /// Codegree ceiling defining the good event.
    pub delta: f64,
    pub exact_mean: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    /// Deviation used for the bounds, `t_rel * exact_mean`.
    pub t: f64,
    /// `P(Y >= mu_hat + t_rel mu_hat)`.
    pub upper_tail: TailEstimate,
    /// `P(|Y - mu_hat| >= t_rel mu_hat)`.
    pub two_sided_tail: TailEstimate,
    /// Empirical `P(max codegree > Delta)`.
    pub gamma_failure: TailEstimate,
    /// Union bound on `P(max codegree > Delta)` from the exact binomial law.
    pub gamma_failure_bound: f64,
    /// Worst case `c_k = n - 2`.
    pub bdi: BoundSummary,
    /// `c_k = Delta`, `d_k = n`, `gamma_k = 1/n`.
    pub tbdi: BoundSummary,
    /// As `tbdi` with `c_k = floor(Delta)` and the factor 4 for 0-1
    /// coordinates.
    pub tbdi_two_valued: BoundSummary,
    pub tbdi_bernstein: BoundSummary,
    /// `upper_tail.point <= tbdi_two_valued + budget + CI half-width`.
    pub within_bound: bool,
}

pub fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> HostGraph {
    let mut g = HostGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.insert_edge(u, v);
            }
        }
    }
    g
}

pub fn count_triangles(g: &HostGraph) -> u64 {
    g.edges().map(|(u, v)| u64::from(g.codegree(u, v))).sum::<u64>() / 3
}

/// `binom(n, 2) * P(Bin(n - 2, p^2) > delta)`, capped at 1.
pub fn codegree_failure_bound(n: usize, p: f64, delta: f64) -> f64 {
    if n < 3 {
        return 0.0;
    }
    let law = Binomial::new(p * p, (n - 2) as u64).expect("valid binomial");
    let pairs = (n * (n - 1) / 2) as f64;
    (pairs * law.sf(delta.floor() as u64)).min(1.0)
}

pub fn triangle_experiment(cfg: &TriangleConfig) -> Result<TriangleReport, HarnessError> {
    if !(cfg.p > 0.0 && cfg.p < 1.0) {
        return Err(HarnessError::OutOfRange { name: "p", value: cfg.p });
    }
    if !(cfg.t_rel > 0.0) {
        return Err(HarnessError::OutOfRange { name: "t_rel", value: cfg.t_rel });
    }
    if cfg.n < 3 {
        return Err(HarnessError::OutOfRange { name: "n", value: cfg.n as f64 });
    }
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let (n, p) = (cfg.n, cfg.p);
    let nf = n as f64;
    let pairs = n * (n - 1) / 2;
    let delta = (2.0 * nf * p * p).max(nf.powf(cfg.eps));
    let exact_mean = nf * (nf - 1.0) * (nf - 2.0) / 6.0 * p.powi(3);
    let t = cfg.t_rel * exact_mean;

    let samples: Vec<(u64, u32)> = (0..cfg.trials)
        .into_par_iter()
        .map(|r| {
            let g = sample_gnp(n, p, &mut stream_rng(cfg.seed, r, STREAM_GNP));
            (count_triangles(&g), g.max_codegree())
        })
        .collect();
    let counts: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
    let (mu_hat, std) = mean_std(&counts);
    let dev = cfg.t_rel * mu_hat;
    let upper = counts.iter().filter(|&&y| y >= mu_hat + dev).count() as u64;
    let both = counts.iter().filter(|&&y| (y - mu_hat).abs() >= dev).count() as u64;
    let failures = samples.iter().filter(|s| f64::from(s.1) > delta).count() as u64;

    let gamma_failure_bound = codegree_failure_bound(n, p, delta);
    let bdi = bdi_bound(&LipschitzProfile::worst_case(vec![nf - 2.0; pairs])?, t)?;
    let gamma = 1.0 / nf;
    let real = LipschitzProfile::uniform(pairs, delta, nf, gamma)?;
    let tbdi = tbdi_bound(&real, t, &TbdiOptions { gamma_fail: Some(gamma_failure_bound), ..Default::default() })?;
    // codegrees are integers, so the good event caps them at floor(Delta)
    let integral = LipschitzProfile::uniform(pairs, delta.floor(), nf, gamma)?;
    let two_valued = tbdi_bound(
        &integral,
        t,
        &TbdiOptions { gamma_fail: Some(gamma_failure_bound), two_valued: true, ..Default::default() },
    )?;
    let bernstein = tbdi_bernoulli_bound(
        &integral.clone().with_p(vec![p; pairs])?,
        t,
        &BernoulliOptions { gamma_fail: Some(gamma_failure_bound), ..Default::default() },
    )?;

    let upper_tail = TailEstimate::from_counts(upper, cfg.trials)?;
    let budget = two_valued.bad_budget.unwrap_or(0.0);
    let within_bound = upper_tail.point <= two_valued.value + budget + upper_tail.half_width();
    Ok(TriangleReport {
        config: cfg.clone(),
        pairs,
        delta,
        exact_mean,
        empirical_mean: mu_hat,
        empirical_std: std,
        t,
        upper_tail,
        two_sided_tail: TailEstimate::from_counts(both, cfg.trials)?,
        gamma_failure: TailEstimate::from_counts(failures, cfg.trials)?,
        gamma_failure_bound,
        bdi: (&bdi).into(),
        tbdi: (&tbdi).into(),
        tbdi_two_valued: (&two_valued).into(),
        tbdi_bernstein: (&bernstein).into(),
        within_bound,
    })
}

impl Report for TriangleReport {
    fn kind(&self) -> &'static str {
        "triangle"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        let n = self.config.n;
        let stats = [
            ("delta", self.delta),
            ("exact_mean", self.exact_mean),
            ("empirical_mean", self.empirical_mean),
            ("empirical_std", self.empirical_std),
            ("upper_tail", self.upper_tail.point),
            ("upper_tail_ci_high", self.upper_tail.ci_high),
            ("two_sided_tail", self.two_sided_tail.point),
            ("gamma_failure", self.gamma_failure.point),
            ("gamma_failure_bound", self.gamma_failure_bound),
            ("bdi", self.bdi.value),
            ("tbdi", self.tbdi.value),
            ("tbdi_two_valued", self.tbdi_two_valued.value),
            ("tbdi_bernstein", self.tbdi_bernstein.value),
            ("bad_budget", self.tbdi_two_valued.bad_budget.unwrap_or(0.0)),
        ];
        stats.iter().map(|&(s, v)| CsvRow::new("triangle", n, s, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_counts() {
        assert_eq!(count_triangles(&HostGraph::complete(6)), 20);
        assert_eq!(count_triangles(&HostGraph::petersen()), 0);
    }

    #[test]
    fn gnp_edge_density() {
        let g = sample_gnp(200, 0.3, &mut stream_rng(1, 0, STREAM_GNP));
        let frac = g.edge_count() as f64 / 19900.0;
        assert!((frac - 0.3).abs() < 0.02, "{frac}");
    }

    #[test]
    fn small_experiment_is_reproducible() {
        let cfg = TriangleConfig { n: 30, p: 0.3, eps: 0.1, t_rel: 0.5, trials: 40, seed: 3 };
        let a = triangle_experiment(&cfg).unwrap();
        assert_eq!(a, triangle_experiment(&cfg).unwrap());
        assert!(a.bdi.value >= a.tbdi_two_valued.value || a.tbdi_two_valued.value == 1.0);
        assert!((a.exact_mean - 4060.0 * 0.027).abs() < 1e-9);
    }
}
