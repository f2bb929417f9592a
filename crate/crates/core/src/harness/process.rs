use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{CsvRow, Report};
use super::{fit_power_law, mean_std, ExponentFit, HarnessError, TailEstimate};
use crate::graphs::{extension_extremes, pattern_stats, HostGraph, Matcher, PatternGraph};
use crate::processes::{
    default_m_cap, edge_order, perturb_and_rerun, psi, random_perturbation, reverse_addition_run, stream_rng, Family,
    Perturbation, ProcessConfig, Variant, STREAM_PERTURB,
};

fn family_label(patterns: &[PatternGraph]) -> String {
    patterns.iter().map(|p| p.label()).collect::<Vec<_>>().join("+")
}

fn max_edges(patterns: &[PatternGraph]) -> usize {
    patterns.iter().map(|p| p.e()).max().unwrap_or(0)
}

fn traversed(n: usize, order: &[(usize, usize)]) -> HostGraph {
    let mut g = HostGraph::empty(n);
    for &(u, v) in order {
        g.insert_edge(u, v);
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseConfig {
    pub patterns: Vec<PatternGraph>,
    pub n_grid: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Run to the end instead of truncating at the default `m`.
    #[serde(default)]
    pub untruncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseRow {
    pub n: usize,
    pub m_cap: usize,
    pub trials: u64,
    pub mean: f64,
    pub std: f64,
    pub std_over_sqrt_mean: f64,
    /// `(ln n)^(4 e_H)`, the concentration window factor.
    pub log_window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseReport {
    pub family: String,
    /// `2 - 1/d2(H)` for a single 2-balanced pattern.
    pub predicted_slope: Option<f64>,
    pub rows: Vec<ReverseRow>,
    pub fit: Option<ExponentFit>,
}

pub fn reverse_process_experiment(cfg: &ReverseConfig) -> Result<ReverseReport, HarnessError> {
    if cfg.n_grid.is_empty() {
        return Err(HarnessError::Invalid("grid is empty".into()));
    }
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    if cfg.patterns.is_empty() {
        return Err(HarnessError::Invalid("pattern family is empty".into()));
    }
    let predicted_slope = match cfg.patterns.as_slice() {
        [h] => {
            let s = pattern_stats(h)?;
            s.two_balanced.then(|| 2.0 - 1.0 / s.d2_f64())
        }
        _ => None,
    };
    let e_h = max_edges(&cfg.patterns) as i32;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for (gi, &n) in cfg.n_grid.iter().enumerate() {
        let total = n * n.saturating_sub(1) / 2;
        let m_cap = if cfg.untruncated { total } else { default_m_cap(n, &cfg.patterns)? };
        let finals: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|r| {
                let pc = ProcessConfig::new(n, cfg.patterns.clone(), Variant::ReverseAddition, cfg.seed)
                    .replication(((gi as u64) << 32) | r)
                    .truncated(m_cap);
                reverse_addition_run(&pc).map(|o| o.final_edges as f64)
            })
            .collect::<Result<_, _>>()?;
        let (mean, std) = mean_std(&finals);
        rows.push(ReverseRow {
            n,
            m_cap,
            trials: cfg.trials,
            mean,
            std,
            std_over_sqrt_mean: if mean > 0.0 { std / mean.sqrt() } else { 0.0 },
            log_window: (n as f64).ln().powi(4 * e_h),
        });
    }
    let data: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean)).collect();
    // short grids and flat-at-zero families (single edges) have nothing to fit
    let fit = if data.len() >= 3 && data.iter().all(|d| d.1 > 0.0) { Some(fit_power_law(&data)?) } else { None };
    Ok(ReverseReport { family: family_label(&cfg.patterns), predicted_slope, rows, fit })
}

impl Report for ReverseReport {
    fn kind(&self) -> &'static str {
        "reverse"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        let mut out = Vec::new();
        for r in &self.rows {
            for (s, v) in [
                ("m_cap", r.m_cap as f64),
                ("mean", r.mean),
                ("std", r.std),
                ("std_over_sqrt_mean", r.std_over_sqrt_mean),
                ("log_window", r.log_window),
            ] {
                out.push(CsvRow::new("reverse", r.n, s, v));
            }
        }
        out
    }

    fn plot_series(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        let mut series = vec![("mean".to_string(), self.rows.iter().map(|r| (r.n as f64, r.mean)).collect())];
        if let Some(fit) = &self.fit {
            series.push(("fit".to_string(), self.rows.iter().map(|r| (r.n as f64, fit.predict(r.n as f64))).collect()));
        }
        series
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub patterns: Vec<PatternGraph>,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Truncation point; the default `m` when absent.
    #[serde(default)]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub pairs: usize,
    /// Truncated and full runs end with the same graph.
    pub agreement: TailEstimate,
    /// Every pair closes a copy with the first `m` edges.
    pub every_pair_closes: TailEstimate,
}

pub fn coupling_experiment(cfg: &CouplingConfig) -> Result<CouplingReport, HarnessError> {
    if cfg.n < 8 {
        return Err(HarnessError::OutOfRange { name: "n", value: cfg.n as f64 });
    }
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let pairs = cfg.n * (cfg.n - 1) / 2;
    let m = match cfg.m {
        Some(m) => m.min(pairs),
        None => default_m_cap(cfg.n, &cfg.patterns)?,
    };
    let results: Vec<(bool, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|r| {
            let base = ProcessConfig::new(cfg.n, cfg.patterns.clone(), Variant::ReverseAddition, cfg.seed).replication(r);
            let full = reverse_addition_run(&base)?;
            let cut = reverse_addition_run(&base.clone().truncated(m))?;
            let order = edge_order(cfg.n, cfg.seed, r);
            let closes = Family::new(&cfg.patterns).every_pair_closes(&traversed(cfg.n, &order[..m]));
            Ok((full.final_graph == cut.final_graph, closes))
        })
        .collect::<Result<_, HarnessError>>()?;
    let agree = results.iter().filter(|r| r.0).count() as u64;
    let closes = results.iter().filter(|r| r.1).count() as u64;
    Ok(CouplingReport {
        family: family_label(&cfg.patterns),
        n: cfg.n,
        m,
        pairs,
        agreement: TailEstimate::from_counts(agree, cfg.trials)?,
        every_pair_closes: TailEstimate::from_counts(closes, cfg.trials)?,
    })
}

impl Report for CouplingReport {
    fn kind(&self) -> &'static str {
        "coupling"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        [
            ("m", self.m as f64),
            ("agreement", self.agreement.point),
            ("agreement_ci_low", self.agreement.ci_low),
            ("every_pair_closes", self.every_pair_closes.point),
            ("every_pair_closes_ci_low", self.every_pair_closes.ci_low),
        ]
        .iter()
        .map(|&(s, v)| CsvRow::new("coupling", self.n, s, v))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConfig {
    pub pattern: PatternGraph,
    pub n: usize,
    /// Truncation point; the default `m` when absent.
    #[serde(default)]
    pub m: Option<usize>,
    pub sweeps: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pattern: String,
    pub n: usize,
    pub m: usize,
    /// `(ln n)^(2 e_H)`.
    pub psi: f64,
    /// `2 e_H psi`.
    pub limit: f64,
    /// `min(m, n^(v_H - 2))`.
    pub worst_case: f64,
    pub sweeps: u64,
    pub swaps: u64,
    pub replacements: u64,
    /// Pairs where both runs have at most `psi` copies through every pair.
    pub conforming: u64,
    pub nonconforming: TailEstimate,
    pub violations: u64,
    pub max_change_conforming: u64,
    pub max_change: u64,
}

pub fn lipschitz_sweep(cfg: &LipschitzConfig) -> Result<LipschitzReport, HarnessError> {
    let pairs = cfg.n * cfg.n.saturating_sub(1) / 2;
    let patterns = vec![cfg.pattern.clone()];
    let m = match cfg.m {
        Some(m) if m > pairs => return Err(HarnessError::OutOfRange { name: "m", value: m as f64 }),
        Some(m) => m,
        None => default_m_cap(cfg.n, &patterns)?,
    };
    if cfg.sweeps == 0 {
        return Err(HarnessError::NoTrials);
    }
    let psi_h = psi(cfg.n, &cfg.pattern);
    let limit = 2.0 * cfg.pattern.e() as f64 * psi_h;
    let pc = ProcessConfig::new(cfg.n, patterns, Variant::ReverseAddition, cfg.seed).truncated(m);
    let results: Vec<(Perturbation, bool, u64)> = (0..cfg.sweeps)
        .into_par_iter()
        .map(|r| {
            let order = edge_order(cfg.n, cfg.seed, r);
            let mut rng = stream_rng(cfg.seed, r, STREAM_PERTURB);
            let pert = random_perturbation(&mut rng, cfg.n, &order, m);
            let (a, b) = perturb_and_rerun(&pc.clone().replication(r), &order, pert)?;
            let other = pert.apply(&order)?;
            let mut matcher = Matcher::new(&cfg.pattern);
            let ok_a = extension_extremes(&traversed(cfg.n, &order[..m]), &mut matcher).bounded_by(psi_h);
            let ok_b = ok_a && extension_extremes(&traversed(cfg.n, &other[..m]), &mut matcher).bounded_by(psi_h);
            Ok((pert, ok_b, a.final_edges.abs_diff(b.final_edges) as u64))
        })
        .collect::<Result<_, HarnessError>>()?;
    let swaps = results.iter().filter(|r| matches!(r.0, Perturbation::Swap(..))).count() as u64;
    let replacements = results.iter().filter(|r| matches!(r.0, Perturbation::Replace(..))).count() as u64;
    let conforming = results.iter().filter(|r| r.1).count() as u64;
    let violations = results.iter().filter(|r| r.1 && r.2 as f64 > limit).count() as u64;
    let max_change_conforming = results.iter().filter(|r| r.1).map(|r| r.2).max().unwrap_or(0);
    let max_change = results.iter().map(|r| r.2).max().unwrap_or(0);
    Ok(LipschitzReport {
        pattern: cfg.pattern.label(),
        n: cfg.n,
        m,
        psi: psi_h,
        limit,
        worst_case: (m as f64).min((cfg.n as f64).powi(cfg.pattern.v() as i32 - 2)),
        sweeps: cfg.sweeps,
        swaps,
        replacements,
        conforming,
        nonconforming: TailEstimate::from_counts(cfg.sweeps - conforming, cfg.sweeps)?,
        violations,
        max_change_conforming,
        max_change,
    })
}

impl Report for LipschitzReport {
    fn kind(&self) -> &'static str {
        "lipschitz"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        [
            ("m", self.m as f64),
            ("psi", self.psi),
            ("limit", self.limit),
            ("worst_case", self.worst_case),
            ("conforming", self.conforming as f64),
            ("violations", self.violations as f64),
            ("max_change_conforming", self.max_change_conforming as f64),
            ("max_change", self.max_change as f64),
        ]
        .iter()
        .map(|&(s, v)| CsvRow::new("lipschitz", self.n, s, v))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Vec<PatternGraph> {
        vec![PatternGraph::named("K3").unwrap()]
    }

    #[test]
    fn full_truncation_always_agrees() {
        let r = coupling_experiment(&CouplingConfig { patterns: k3(), n: 12, trials: 30, seed: 1, m: Some(66) }).unwrap();
        assert_eq!(r.agreement.hits, 30);
        assert_eq!(r.every_pair_closes.hits, 30);
    }

    #[test]
    fn early_truncation_can_disagree() {
        let r = coupling_experiment(&CouplingConfig { patterns: k3(), n: 12, trials: 30, seed: 1, m: Some(3) }).unwrap();
        assert!(r.agreement.hits < 30);
        assert_eq!(r.every_pair_closes.hits, 0);
    }

    #[test]
    fn reverse_rows_and_errors() {
        let cfg = ReverseConfig { patterns: k3(), n_grid: vec![10, 20, 40], trials: 10, seed: 2, untruncated: false };
        let r = reverse_process_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.predicted_slope, Some(1.5));
        assert!(r.fit.is_some());
        let short = ReverseConfig { n_grid: vec![10, 20], ..cfg.clone() };
        let r = reverse_process_experiment(&short).unwrap();
        assert_eq!((r.rows.len(), r.fit.is_none()), (2, true));
        let empty = ReverseConfig { n_grid: vec![], ..cfg };
        assert!(reverse_process_experiment(&empty).is_err());
    }

    #[test]
    fn sweep_counts_perturbation_kinds() {
        let cfg = LipschitzConfig { pattern: k3()[0].clone(), n: 16, m: Some(60), sweeps: 40, seed: 5 };
        let r = lipschitz_sweep(&cfg).unwrap();
        assert_eq!(r.swaps + r.replacements, 40);
        assert!(r.replacements > 0 && r.swaps > 0);
        assert_eq!(r.violations, 0);
    }
}
