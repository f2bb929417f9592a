//! Reproducible random instances for fuzzing the exact oracle.
//!
//! Instance `i` of seed `s` is drawn from a ChaCha8 stream keyed by `s` with
//! stream id `i`, so any single instance can be regenerated on its own.
//!
//! Distribution (with the default config):
//! - `N` uniform in `1..=8`;
//! - with probability 1/2 every alphabet is binary, otherwise each size is
//!   uniform in `{2, 3}`;
//! - weights are random compositions of `weight_grid` into positive parts,
//!   divided by `weight_grid` (dyadic for the default grid of 8);
//! - `f` is one of: a random table on a 1/16 grid in `[0, 4]`; a coordinate
//!   sum plus a spike on a random box; a monotone increasing table; a scaled
//!   threshold of the coordinate sum;
//! - the failure density of `Gamma` is drawn from `good_densities`, then
//!   `Gamma` is a random table, the complement of the spike box, or an up/down
//!   set of the coordinate sum;
//! - with probability 1/2 local good sets drop the lightest value of each
//!   coordinate independently with probability 0.3, and `Gamma` is
//!   intersected with their product;
//! - `gamma` is drawn from `gamma_choices`, either shared or per coordinate.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{BoundCheck, ExactReport, LemmaReport};
use super::model::ExactModel;
use super::space::{FiniteProductSpace, SpaceError, SpaceLimits};
use super::spec::{EventSpec, FnSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub min_coords: usize,
    pub max_coords: usize,
    pub max_alphabet: usize,
    pub binary_probability: f64,
    pub weight_grid: usize,
    pub good_densities: Vec<f64>,
    pub gamma_choices: Vec<f64>,
    pub local_good_probability: f64,
    /// Deviations tested, as multiples of `range / 4`.
    pub t_multipliers: Vec<f64>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            min_coords: 1,
            max_coords: 8,
            max_alphabet: 3,
            binary_probability: 0.5,
            weight_grid: 8,
            good_densities: vec![0.0, 0.02, 0.05, 0.1, 0.3],
            gamma_choices: vec![0.05, 0.1, 0.25, 0.5, 1.0],
            local_good_probability: 0.5,
            t_multipliers: vec![0.5, 1.0, 2.0],
        }
    }
}

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn composition(rng: &mut ChaCha8Rng, grid: usize, parts: usize) -> Vec<f64> {
    let parts = parts.min(grid);
    let mut cuts = rand::seq::index::sample(rng, grid - 1, parts - 1).into_vec();
    for c in cuts.iter_mut() {
        *c += 1;
    }
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(std::iter::once(grid)) {
        out.push((c - prev) as f64 / grid as f64);
        prev = c;
    }
    out
}

fn random_box(rng: &mut ChaCha8Rng, sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes
        .iter()
        .map(|&s| {
            if rng.random_bool(0.5) {
                vec![s - 1]
            } else {
                (0..s).collect()
            }
        })
        .collect()
}

pub fn generate_space(config: &GeneratorConfig, seed: u64, index: u64) -> FiniteProductSpace {
    let mut rng = instance_rng(seed, index);
    let n = rng.random_range(config.min_coords..=config.max_coords);
    let binary = rng.random_bool(config.binary_probability);
    let sizes: Vec<usize> = (0..n)
        .map(|_| if binary { 2 } else { rng.random_range(2..=config.max_alphabet.max(2)) })
        .collect();
    let weights: Vec<Vec<f64>> = sizes.iter().map(|&s| composition(&mut rng, config.weight_grid, s)).collect();
    let sizes: Vec<usize> = weights.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();

    let spike_box = random_box(&mut rng, &sizes);
    let f = match rng.random_range(0..4) {
        0 => FnSpec::Table { values: (0..total).map(|_| rng.random_range(0..=64) as f64 / 16.0).collect() },
        1 => {
            let height = *[2.0, 5.0, 10.0].choose(&mut rng).expect("non-empty");
            let spike = FnSpec::Scale {
                factor: height,
                inner: Box::new(FnSpec::Product {
                    factors: spike_box
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.len() == 1)
                        .map(|(k, s)| FnSpec::Indicator { k, value: s[0] })
                        .collect(),
                }),
            };
            FnSpec::Sum { terms: vec![FnSpec::coordinate_sum(n), spike] }
        }
        2 => {
            let mut terms: Vec<FnSpec> = (0..n)
                .map(|k| FnSpec::Scale {
                    factor: *[0.0, 0.5, 1.0, 2.0].choose(&mut rng).expect("non-empty"),
                    inner: Box::new(FnSpec::Coord { k }),
                })
                .collect();
            let top = rng.random_range(1..=4) as f64;
            terms.push(FnSpec::Scale {
                factor: top,
                inner: Box::new(FnSpec::Product { factors: (0..n).map(|k| FnSpec::Coord { k }).collect() }),
            });
            FnSpec::Sum { terms }
        }
        _ => {
            let max_sum: usize = sizes.iter().map(|s| s - 1).sum();
            FnSpec::Scale {
                factor: rng.random_range(1..=3) as f64,
                inner: Box::new(FnSpec::Step {
                    inner: Box::new(FnSpec::coordinate_sum(n)),
                    at_least: rng.random_range(0..=max_sum) as f64,
                }),
            }
        }
    };

    let density = *config.good_densities.choose(&mut rng).expect("non-empty densities");
    let mut good = if density == 0.0 {
        EventSpec::All
    } else {
        match rng.random_range(0..3) {
            0 => EventSpec::Table { members: (0..total).map(|_| !rng.random_bool(density)).collect() },
            1 => EventSpec::Not { inner: Box::new(EventSpec::InBox { sets: spike_box.clone() }) },
            _ => {
                let max_sum: usize = sizes.iter().map(|s| s - 1).sum();
                let bound = rng.random_range(0..=max_sum) as f64;
                if rng.random_bool(0.5) {
                    EventSpec::AtMost { inner: FnSpec::coordinate_sum(n), bound }
                } else {
                    EventSpec::AtLeast { inner: FnSpec::coordinate_sum(n), bound }
                }
            }
        }
    };

    let mut local_good = None;
    if rng.random_bool(config.local_good_probability) {
        let sets: Vec<Vec<bool>> = weights
            .iter()
            .map(|w| {
                let lightest = (0..w.len()).min_by(|&a, &b| w[a].total_cmp(&w[b])).expect("non-empty");
                let drop = rng.random_bool(0.3);
                (0..w.len()).map(|v| !(drop && v == lightest)).collect()
            })
            .collect();
        let boxed: Vec<Vec<usize>> =
            sets.iter().map(|s| (0..s.len()).filter(|&v| s[v]).collect()).collect();
        good = EventSpec::And { parts: vec![good, EventSpec::InBox { sets: boxed }] };
        local_good = Some(sets);
    }

    let gamma: Vec<f64> = if rng.random_bool(0.5) {
        vec![*config.gamma_choices.choose(&mut rng).expect("non-empty gammas"); n]
    } else {
        (0..n).map(|_| *config.gamma_choices.choose(&mut rng).expect("non-empty gammas")).collect()
    };

    FiniteProductSpace { weights, f, good, gamma, local_good }
}

/// A failing check, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub index: u64,
    pub t: f64,
    pub check: BoundCheck,
    pub space: FiniteProductSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub checks: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Number of evaluations per check name, sorted by name.
    pub coverage: Vec<(String, usize)>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// The exact reports of one instance at every configured deviation.
pub fn check_instance(
    config: &GeneratorConfig,
    seed: u64,
    index: u64,
) -> Result<(FiniteProductSpace, Vec<ExactReport>), SpaceError> {
    let space = generate_space(config, seed, index);
    let model = ExactModel::build(&space, &SpaceLimits::default())?;
    let range = model.max_f() - model.min_f();
    let reports = config.t_multipliers.iter().map(|m| model.tbdi_report(m * range / 4.0)).collect();
    Ok((space, reports))
}

/// Runs the theorem suite over `count` instances in parallel. Results are
/// ordered by instance index regardless of scheduling.
pub fn run_product_space_suite(
    config: &GeneratorConfig,
    seed: u64,
    count: u64,
) -> Result<SuiteSummary, SpaceError> {
    let results: Vec<_> = (0..count)
        .into_par_iter()
        .map(|index| check_instance(config, seed, index).map(|r| (index, r)))
        .collect::<Result<_, _>>()?;
    let mut summary = SuiteSummary { instances: count as usize, checks: 0, counterexamples: Vec::new(), coverage: Vec::new() };
    let mut coverage = std::collections::BTreeMap::<String, usize>::new();
    for (index, (space, reports)) in results {
        for report in reports {
            summary.checks += report.checks.len();
            for check in &report.checks {
                *coverage.entry(check.name.clone()).or_default() += 1;
                if !check.holds {
                    summary.counterexamples.push(Counterexample {
                        seed,
                        index,
                        t: report.t,
                        check: check.clone(),
                        space: space.clone(),
                    });
                }
            }
        }
    }
    summary.coverage = coverage.into_iter().collect();
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteSummary {
    pub instances: usize,
    pub checks: usize,
    pub failures: Vec<(u64, LemmaReport)>,
}

/// Lemma checks on `count` generated martingales, each at `t = range / 4`
/// and `t = range / 2`.
pub fn run_martingale_suite(
    config: &GeneratorConfig,
    seed: u64,
    count: u64,
) -> Result<LemmaSuiteSummary, SpaceError> {
    let results: Vec<(u64, Vec<LemmaReport>)> = (0..count)
        .into_par_iter()
        .map(|index| {
            let space = generate_space(config, seed, index);
            let model = ExactModel::build(&space, &SpaceLimits::default())?;
            let range = model.max_f() - model.min_f();
            Ok((index, [0.25, 0.5].iter().map(|m| model.lemma_report(m * range)).collect()))
        })
        .collect::<Result<_, SpaceError>>()?;
    let mut summary = LemmaSuiteSummary { instances: count as usize, checks: 0, failures: Vec::new() };
    for (index, reports) in results {
        for report in reports {
            summary.checks += report.checks.len() + 1;
            if !report.holds() {
                summary.failures.push((index, report));
            }
        }
    }
    Ok(summary)
}
