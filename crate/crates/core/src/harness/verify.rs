//! Fixed verification suites that do not need enumeration of product
//! spaces: Bernstein against the binomial tail, Bennett against Bernstein,
//! and equivalence of the reverse process formulations.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use super::output::{CsvRow, Report};
use super::HarnessError;
use crate::bounds::{bennett_exponent, bernstein_exponent, tbdi_bernoulli_bound, BernoulliOptions, LipschitzProfile};
use crate::graphs::PatternGraph;
use crate::processes::exhaustive::{addition_distribution_by_orders, removal_distribution};
use crate::processes::{reverse_addition_run, reverse_removal_run, stream_rng, ProcessConfig, Variant};

const STREAM_SAMPLES: u8 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRow {
    pub t: u64,
    pub exact: f64,
    pub bound: f64,
    pub exponent: f64,
    /// `t^2 / (2V)`.
    pub clt_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub n: usize,
    pub p: f64,
    pub mean: f64,
    pub variance: f64,
    pub rows: Vec<BernsteinRow>,
    /// The bound is at least the exact tail at every `t`.
    pub dominates: bool,
    /// For `t <= sqrt(V)` the exponent is at least half of `t^2/(2V)`.
    pub within_factor_two: bool,
}

impl BernsteinReport {
    pub fn passed(&self) -> bool {
        self.dominates && self.within_factor_two
    }
}

/// Compares the Bernstein-form bound for a sum of `n` i.i.d. Bernoulli(`p`)
/// variables with its exact upper tail `P(S >= np + t)`, `t = 0, 1, ..`.
pub fn bernstein_tightness(n: usize, p: f64) -> Result<BernsteinReport, HarnessError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(HarnessError::OutOfRange { name: "p", value: p });
    }
    let law = Binomial::new(p, n as u64).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let profile = LipschitzProfile::worst_case(vec![1.0; n])?.with_p(vec![p; n])?;
    let mean = n as f64 * p;
    let variance = n as f64 * p * (1.0 - p);
    let mut rows = Vec::new();
    for t in 0..=(n as u64) {
        let threshold = (mean + t as f64).ceil();
        if threshold > n as f64 {
            break;
        }
        let exact = if threshold <= 0.0 { 1.0 } else { law.sf(threshold as u64 - 1) };
        let bound = tbdi_bernoulli_bound(&profile, t as f64, &BernoulliOptions::default())?;
        let tf = t as f64;
        rows.push(BernsteinRow { t, exact, bound: bound.value, exponent: bound.exponent, clt_exponent: tf * tf / (2.0 * variance) });
    }
    let dominates = rows.iter().all(|r| r.bound >= r.exact);
    let within_factor_two = rows.iter().filter(|r| (r.t as f64) <= variance.sqrt()).all(|r| r.exponent * 2.0 >= r.clt_exponent);
    Ok(BernsteinReport { n, p, mean, variance, rows, dominates, within_factor_two })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BennettReport {
    pub samples: u64,
    /// Triples where the Bennett exponent is below the Bernstein one.
    pub violations: u64,
    /// Triples with `Ct/V >= 1e-3` where the two exponents coincide.
    pub ties_away_from_zero: u64,
    /// Smallest `Ct/V` among exact ties, if any.
    pub smallest_tie: Option<f64>,
    pub max_gap: f64,
}

impl BennettReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.ties_away_from_zero == 0
    }
}

/// Draws `(V, C, t)` log-uniformly and compares the exponents.
pub fn bennett_dominance(samples: u64, seed: u64) -> Result<BennettReport, HarnessError> {
    if samples == 0 {
        return Err(HarnessError::NoTrials);
    }
    let draws: Vec<(f64, f64, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r, STREAM_SAMPLES);
            let mut log_uniform = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
            let v = log_uniform(-3.0, 3.0);
            let c = log_uniform(-3.0, 3.0);
            let t = log_uniform(-6.0, 4.0);
            (c * t / v, bennett_exponent(v, c, t), bernstein_exponent(v, c, t), t)
        })
        .collect();
    let mut report = BennettReport { samples, violations: 0, ties_away_from_zero: 0, smallest_tie: None, max_gap: 0.0 };
    for &(x, bennett, bernstein, _) in &draws {
        if bennett < bernstein * (1.0 - 1e-12) {
            report.violations += 1;
        }
        if bennett <= bernstein {
            if x >= 1e-3 {
                report.ties_away_from_zero += 1;
            }
            report.smallest_tie = Some(report.smallest_tie.map_or(x, |s: f64| s.min(x)));
        }
        if bennett.is_finite() {
            report.max_gap = report.max_gap.max(bennett - bernstein);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub pattern: String,
    /// Exact laws at the small size: `(k, P_addition, P_removal)`.
    pub exhaustive_n: usize,
    pub exhaustive: Vec<(usize, f64, f64)>,
    pub exhaustive_identical: bool,
    pub sampled_n: usize,
    pub runs: u64,
    /// `(k, addition count, removal count)`.
    pub histogram: Vec<(usize, u64, u64)>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub alpha: f64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.exhaustive_identical && self.p_value >= self.alpha
    }
}

/// Two-sample chi-square homogeneity test; bins with fewer than `min_count`
/// pooled observations are merged into their neighbour.
pub fn two_sample_chi_square(a: &[u64], b: &[u64], min_count: u64) -> (f64, usize, f64) {
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut pending = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        pending = (pending.0 + x, pending.1 + y);
        if pending.0 + pending.1 >= min_count {
            bins.push(pending);
            pending = (0, 0);
        }
    }
    if pending.0 + pending.1 > 0 {
        match bins.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => bins.push(pending),
        }
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if bins.len() < 2 || na == 0.0 || nb == 0.0 {
        return (0.0, 0, 1.0);
    }
    let total = na + nb;
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let col = (x + y) as f64;
        for (obs, rows) in [(x as f64, na), (y as f64, nb)] {
            let expected = rows * col / total;
            stat += (obs - expected) * (obs - expected) / expected;
        }
    }
    let df = bins.len() - 1;
    let p = 1.0 - ChiSquared::new(df as f64).expect("df >= 1").cdf(stat);
    (stat, df, p)
}

/// Exact comparison at `exhaustive_n`, chi-square test on `runs` paired
/// runs at `sampled_n`.
pub fn formulation_equivalence(
    pattern: &PatternGraph,
    exhaustive_n: usize,
    sampled_n: usize,
    runs: u64,
    seed: u64,
    alpha: f64,
) -> Result<EquivalenceReport, HarnessError> {
    let family = vec![pattern.clone()];
    let add = addition_distribution_by_orders(exhaustive_n, &family)?;
    let rem = removal_distribution(exhaustive_n, &family)?;
    let keys: std::collections::BTreeSet<usize> = add.probs.keys().chain(rem.probs.keys()).copied().collect();
    let exhaustive = keys
        .iter()
        .map(|&k| (k, add.to_f64().get(&k).copied().unwrap_or(0.0), rem.to_f64().get(&k).copied().unwrap_or(0.0)))
        .collect();

    let pairs: Vec<(usize, usize)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let a = ProcessConfig::new(sampled_n, family.clone(), Variant::ReverseAddition, seed).replication(r);
            let mut b = a.clone();
            b.variant = Variant::ReverseRemoval;
            Ok((reverse_addition_run(&a)?.final_edges, reverse_removal_run(&b)?.final_edges))
        })
        .collect::<Result<_, HarnessError>>()?;
    let mut hist: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for (x, y) in pairs {
        hist.entry(x).or_default().0 += 1;
        hist.entry(y).or_default().1 += 1;
    }
    let histogram: Vec<(usize, u64, u64)> = hist.into_iter().map(|(k, (x, y))| (k, x, y)).collect();
    let a: Vec<u64> = histogram.iter().map(|h| h.1).collect();
    let b: Vec<u64> = histogram.iter().map(|h| h.2).collect();
    let (chi_square, degrees_of_freedom, p_value) = two_sample_chi_square(&a, &b, 10);
    Ok(EquivalenceReport {
        pattern: pattern.label(),
        exhaustive_n,
        exhaustive,
        exhaustive_identical: add == rem,
        sampled_n,
        runs,
        histogram,
        chi_square,
        degrees_of_freedom,
        p_value,
        alpha,
    })
}

impl Report for BernsteinReport {
    fn kind(&self) -> &'static str {
        "bernstein"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .flat_map(|r| {
                [CsvRow::new("bernstein", r.t as usize, "exact", r.exact), CsvRow::new("bernstein", r.t as usize, "bound", r.bound)]
            })
            .collect()
    }

    fn plot_series(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        vec![
            ("exact".into(), self.rows.iter().map(|r| (r.t as f64, r.exact)).collect()),
            ("bound".into(), self.rows.iter().map(|r| (r.t as f64, r.bound)).collect()),
        ]
    }
}

impl Report for BennettReport {
    fn kind(&self) -> &'static str {
        "bennett"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        vec![
            CsvRow::new("bennett", self.samples as usize, "violations", self.violations as f64),
            CsvRow::new("bennett", self.samples as usize, "ties_away_from_zero", self.ties_away_from_zero as f64),
        ]
    }
}

impl Report for EquivalenceReport {
    fn kind(&self) -> &'static str {
        "equivalence"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows = vec![
            CsvRow::new("equivalence", self.sampled_n, "chi_square", self.chi_square),
            CsvRow::new("equivalence", self.sampled_n, "p_value", self.p_value),
        ];
        for &(_, a, b) in &self.exhaustive {
            rows.push(CsvRow::new("equivalence", self.exhaustive_n, "p_addition", a));
            rows.push(CsvRow::new("equivalence", self.exhaustive_n, "p_removal", b));
        }
        rows
    }
}
