//! Exact final-edge distributions for tiny `n`, by enumeration.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_rational::Ratio;

use super::{all_edges, reverse_on_order, Family, ProcessError};
use crate::graphs::{HostGraph, Matcher, PatternGraph};

/// Largest `n` accepted by the subset recursions.
pub const MAX_EXHAUSTIVE_N: usize = 6;
/// Largest `n` for literal enumeration of edge orders (10! orders).
pub const MAX_ORDER_N: usize = 5;

/// Law of the final number of edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub probs: BTreeMap<usize, Ratio<i128>>,
}

impl ExactDistribution {
    fn from_counts(counts: BTreeMap<usize, u128>) -> Self {
        let total: u128 = counts.values().sum();
        let probs = counts.into_iter().map(|(k, c)| (k, Ratio::new(c as i128, total as i128))).collect();
        ExactDistribution { probs }
    }

    pub fn prob(&self, k: usize) -> Ratio<i128> {
        self.probs.get(&k).copied().unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().map(|(&k, p)| k as f64 * ratio_f64(p)).sum()
    }

    pub fn to_f64(&self) -> BTreeMap<usize, f64> {
        self.probs.iter().map(|(&k, p)| (k, ratio_f64(p))).collect()
    }
}

fn ratio_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check(n: usize, cap: usize) -> Result<(), ProcessError> {
    if n > cap {
        return Err(ProcessError::TooLarge(n, cap));
    }
    Ok(())
}

fn graph_of(n: usize, edges: &[(usize, usize)], mask: u64) -> HostGraph {
    let mut g = HostGraph::empty(n);
    for (i, &(u, v)) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            g.insert_edge(u, v);
        }
    }
    g
}

/// Final-edge counts of the reverse rule over every one of the
/// `binom(n,2)!` edge orders, each run literally.
pub fn addition_counts_by_orders(n: usize, patterns: &[PatternGraph]) -> Result<BTreeMap<usize, u128>, ProcessError> {
    check(n, MAX_ORDER_N)?;
    let edges = all_edges(n);
    let mut family = Family::new(patterns);
    let mut counts = BTreeMap::new();
    for order in edges.iter().copied().permutations(edges.len()) {
        let (g, _) = reverse_on_order(n, &mut family, &order);
        *counts.entry(g.edge_count()).or_insert(0) += 1;
    }
    Ok(counts)
}

pub fn addition_distribution_by_orders(n: usize, patterns: &[PatternGraph]) -> Result<ExactDistribution, ProcessError> {
    Ok(ExactDistribution::from_counts(addition_counts_by_orders(n, patterns)?))
}

/// Same law as `addition_distribution_by_orders`, via a recursion over
/// traversed sets: whether an edge is kept depends only on the set
/// traversed before it.
pub fn addition_distribution(n: usize, patterns: &[PatternGraph]) -> Result<ExactDistribution, ProcessError> {
    check(n, MAX_EXHAUSTIVE_N)?;
    let edges = all_edges(n);
    let big = edges.len();
    let mut family = Family::new(patterns);
    // ways[mask][k]: orders of `mask` as a prefix with k kept edges
    let mut ways: Vec<Vec<u128>> = vec![Vec::new(); 1 << big];
    ways[0] = vec![1];
    for mask in 0u64..(1 << big) {
        let here = std::mem::take(&mut ways[mask as usize]);
        if here.is_empty() {
            continue;
        }
        if mask == (1 << big) - 1 {
            ways[mask as usize] = here;
            break;
        }
        let g = graph_of(n, &edges, mask);
        for (i, &e) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                continue;
            }
            let kept = usize::from(!family.completes(&g, e));
            let next = &mut ways[(mask | 1 << i) as usize];
            if next.len() < here.len() + kept {
                next.resize(here.len() + kept, 0);
            }
            for (k, &w) in here.iter().enumerate() {
                next[k + kept] += w;
            }
        }
    }
    let full = &ways[(1usize << big) - 1];
    Ok(ExactDistribution::from_counts(full.iter().enumerate().filter(|(_, &w)| w > 0).map(|(k, &w)| (k, w)).collect()))
}

type Memo = HashMap<u64, BTreeMap<usize, Ratio<i128>>>;

fn mix(into: &mut BTreeMap<usize, Ratio<i128>>, from: &BTreeMap<usize, Ratio<i128>>, weight: Ratio<i128>) {
    for (&k, p) in from {
        *into.entry(k).or_insert_with(|| Ratio::from_integer(0)) += *p * weight;
    }
}

/// Exact law of the removal formulation: from `K_n`, delete a uniform edge
/// among those in some copy.
pub fn removal_distribution(n: usize, patterns: &[PatternGraph]) -> Result<ExactDistribution, ProcessError> {
    check(n, MAX_EXHAUSTIVE_N)?;
    let edges = all_edges(n);
    let mut family = Family::new(patterns);
    let mut memo = Memo::new();
    let full = if edges.is_empty() { 0 } else { u64::MAX >> (64 - edges.len()) };
    let probs = removal_rec(n, &edges, full, &mut family, &mut memo);
    Ok(ExactDistribution { probs })
}

fn removal_rec(n: usize, edges: &[(usize, usize)], mask: u64, family: &mut Family, memo: &mut Memo) -> BTreeMap<usize, Ratio<i128>> {
    if let Some(d) = memo.get(&mask) {
        return d.clone();
    }
    let g = graph_of(n, edges, mask);
    let live: Vec<usize> = (0..edges.len()).filter(|&i| mask >> i & 1 == 1 && family.completes(&g, edges[i])).collect();
    let mut out = BTreeMap::new();
    if live.is_empty() {
        out.insert(mask.count_ones() as usize, Ratio::from_integer(1));
    } else {
        let w = Ratio::new(1, live.len() as i128);
        for i in live {
            let sub = removal_rec(n, edges, mask & !(1 << i), family, memo);
            mix(&mut out, &sub, w);
        }
    }
    memo.insert(mask, out.clone());
    out
}

/// Exact law of the H-removal process: delete all edges of a uniform copy.
pub fn h_removal_distribution(n: usize, h: &PatternGraph) -> Result<ExactDistribution, ProcessError> {
    check(n, MAX_EXHAUSTIVE_N)?;
    let edges = all_edges(n);
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut matcher = Matcher::new(h);
    let mut memo = Memo::new();
    let full = if edges.is_empty() { 0 } else { u64::MAX >> (64 - edges.len()) };
    let probs = h_removal_rec(n, &edges, &index, full, &mut matcher, &mut memo);
    Ok(ExactDistribution { probs })
}

fn h_removal_rec(
    n: usize,
    edges: &[(usize, usize)],
    index: &HashMap<(usize, usize), usize>,
    mask: u64,
    matcher: &mut Matcher,
    memo: &mut Memo,
) -> BTreeMap<usize, Ratio<i128>> {
    if let Some(d) = memo.get(&mask) {
        return d.clone();
    }
    let copies = matcher.copies(&graph_of(n, edges, mask));
    let mut out = BTreeMap::new();
    if copies.is_empty() {
        out.insert(mask.count_ones() as usize, Ratio::from_integer(1));
    } else {
        let w = Ratio::new(1, copies.len() as i128);
        for copy in &copies {
            let cut = copy.iter().fold(mask, |m, e| m & !(1 << index[e]));
            let sub = h_removal_rec(n, edges, index, cut, matcher, memo);
            mix(&mut out, &sub, w);
        }
    }
    memo.insert(mask, out.clone());
    out
}
