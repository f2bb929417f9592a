//! Monte Carlo experiments set against the tail bounds: tail estimates with
//! exact confidence intervals, power-law fits, and the process experiments.

mod output;
mod process;
mod triangle;
mod verify;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

use crate::bounds::BoundError;
use crate::graphs::GraphError;
use crate::processes::ProcessError;

pub use output::{plotdata, to_json, write_atomic, write_csv, CsvRow, Envelope, Report, SCHEMA_VERSION};
pub use process::{
    coupling_experiment, lipschitz_sweep, reverse_process_experiment, CouplingConfig, CouplingReport, LipschitzConfig,
    LipschitzReport, ReverseConfig, ReverseReport, ReverseRow,
};
pub use triangle::{
    codegree_failure_bound, count_triangles, sample_gnp, triangle_experiment, BoundSummary, TriangleConfig,
    TriangleReport,
};
pub use verify::{
    bennett_dominance, bernstein_tightness, formulation_equivalence, two_sample_chi_square, BennettReport,
    BernsteinReport, BernsteinRow, EquivalenceReport,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("need at least 3 points for a fit, got {0}")]
    TooFewPoints(usize),
    #[error("fit points must be positive and finite, got ({0}, {1})")]
    BadPoint(f64, f64),
    #[error("all fit abscissae coincide")]
    DegenerateFit,
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Hit frequency with a two-sided 95% Clopper-Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub trials: u64,
    pub hits: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl TailEstimate {
    pub fn from_counts(hits: u64, trials: u64) -> Result<Self, HarnessError> {
        if trials == 0 {
            return Err(HarnessError::NoTrials);
        }
        if hits > trials {
            return Err(HarnessError::Invalid(format!("{hits} hits out of {trials} trials")));
        }
        let (ci_low, ci_high) = clopper_pearson(hits, trials, 0.05);
        Ok(TailEstimate { trials, hits, point: hits as f64 / trials as f64, ci_low, ci_high })
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Exact binomial interval at level `1 - alpha`.
pub fn clopper_pearson(hits: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let (k, n) = (hits as f64, trials as f64);
    let low = if hits == 0 { 0.0 } else { Beta::new(k, n - k + 1.0).expect("positive shapes").inverse_cdf(alpha / 2.0) };
    let high =
        if hits == trials { 1.0 } else { Beta::new(k + 1.0, n - k).expect("positive shapes").inverse_cdf(1.0 - alpha / 2.0) };
    let point = k / n;
    (low.min(point), high.max(point))
}

/// Runs `event` for replications `0..trials` on the current rayon pool and
/// counts how often it holds.
pub fn estimate_tail<F>(trials: u64, event: F) -> Result<TailEstimate, HarnessError>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let hits = (0..trials).into_par_iter().filter(|&r| event(r)).count() as u64;
    TailEstimate::from_counts(hits, trials)
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

impl ExponentFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Fits `y = a x^b` on log-log scale.
pub fn fit_power_law(data: &[(f64, f64)]) -> Result<ExponentFit, HarnessError> {
    if data.len() < 3 {
        return Err(HarnessError::TooFewPoints(data.len()));
    }
    let mut points = Vec::with_capacity(data.len());
    for &(x, y) in data {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(HarnessError::BadPoint(x, y));
        }
        points.push((x.ln(), y.ln()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ExponentFit { slope, intercept, r2, points })
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_predicates() {
        let all = estimate_tail(50, |_| true).unwrap();
        assert_eq!((all.point, all.ci_high), (1.0, 1.0));
        assert!(all.ci_low > 0.9);
        let none = estimate_tail(50, |_| false).unwrap();
        assert_eq!((none.point, none.ci_low), (0.0, 0.0));
        assert!(matches!(estimate_tail(0, |_| true), Err(HarnessError::NoTrials)));
    }

    #[test]
    fn known_interval() {
        // 5 of 10: the exact 95% interval is (0.187086, 0.812914)
        let e = TailEstimate::from_counts(5, 10).unwrap();
        assert!((e.ci_low - 0.187_086_1).abs() < 1e-6, "{}", e.ci_low);
        assert!((e.ci_high - 0.812_913_9).abs() < 1e-6, "{}", e.ci_high);
    }

    #[test]
    fn exact_power_law() {
        let data: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0].iter().map(|&n: &f64| (n, 0.37 * n.powf(1.5))).collect();
        let fit = fit_power_law(&data).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-9);
        assert!((fit.intercept - 0.37f64.ln()).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!((fit.predict(1000.0) - 0.37 * 1000f64.powf(1.5)).abs() < 1e-6);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]), Err(HarnessError::TooFewPoints(2))));
        assert!(matches!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(HarnessError::BadPoint(..))));
        assert!(matches!(fit_power_law(&[(2.0, 1.0), (2.0, 3.0), (2.0, 1.0)]), Err(HarnessError::DegenerateFit)));
    }
}
