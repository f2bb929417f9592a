//! Random graph processes driven by forbidden patterns: the reverse
//! H-free process in its edge-order, birth-time and removal forms, the
//! forward H-free process and the H-removal process.

pub mod exhaustive;
pub mod rle;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{pattern_stats, GraphError, HostGraph, Matcher, PatternGraph};

/// RNG stream ids, combined with the replication index.
pub const STREAM_ORDER: u8 = 0;
pub const STREAM_BIRTH: u8 = 1;
pub const STREAM_REMOVAL: u8 = 2;
pub const STREAM_PERTURB: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("pattern family is empty")]
    NoPatterns,
    #[error("set at most one of m_cap and p_cap")]
    BothCaps,
    #[error("p_cap must lie in [0, 1], got {0}")]
    BadPCap(f64),
    #[error("config variant is {got:?}, operation needs {expected:?}")]
    WrongVariant { expected: Variant, got: Variant },
    #[error("h_removal takes a single pattern, got {0}")]
    FamilyNotAllowed(usize),
    #[error("position {index} outside a sequence of length {len}")]
    BadPosition { index: usize, len: usize },
    #[error("edge {0}-{1} appears twice after the perturbation")]
    DuplicateEdge(usize, usize),
    #[error("{0} vertices is too many for exhaustive enumeration (cap {1})")]
    TooLarge(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ReverseAddition,
    ReverseRemoval,
    BirthTime,
    ForwardHfree,
    HRemoval,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.replace('-', "_").as_str() {
            "reverse_addition" => Variant::ReverseAddition,
            "reverse_removal" => Variant::ReverseRemoval,
            "birth_time" => Variant::BirthTime,
            "forward_hfree" => Variant::ForwardHfree,
            "h_removal" => Variant::HRemoval,
            _ => return Err(format!("unknown variant {s:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub n: usize,
    pub patterns: Vec<PatternGraph>,
    pub variant: Variant,
    /// Stop after this many traversed edges.
    #[serde(default)]
    pub m_cap: Option<usize>,
    /// Birth-time cutoff, `birth_time` only.
    #[serde(default)]
    pub p_cap: Option<f64>,
    pub seed: u64,
    #[serde(default)]
    pub replication_index: u64,
}

impl ProcessConfig {
    pub fn new(n: usize, patterns: Vec<PatternGraph>, variant: Variant, seed: u64) -> Self {
        ProcessConfig { n, patterns, variant, m_cap: None, p_cap: None, seed, replication_index: 0 }
    }

    pub fn replication(mut self, index: u64) -> Self {
        self.replication_index = index;
        self
    }

    pub fn truncated(mut self, m: usize) -> Self {
        self.m_cap = Some(m);
        self
    }

    /// Truncates at `default_m_cap`.
    pub fn with_default_truncation(mut self) -> Result<Self, ProcessError> {
        self.m_cap = Some(default_m_cap(self.n, &self.patterns)?);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        if self.patterns.is_empty() {
            return Err(ProcessError::NoPatterns);
        }
        if self.m_cap.is_some() && self.p_cap.is_some() {
            return Err(ProcessError::BothCaps);
        }
        if let Some(p) = self.p_cap {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProcessError::BadPCap(p));
            }
        }
        if self.variant == Variant::ReverseAddition && self.n < 2 {
            return Err(ProcessError::TooFewVertices(self.n));
        }
        if self.variant == Variant::HRemoval && self.patterns.len() != 1 {
            return Err(ProcessError::FamilyNotAllowed(self.patterns.len()));
        }
        Ok(())
    }

    fn expect(&self, expected: Variant) -> Result<(), ProcessError> {
        if self.variant != expected {
            return Err(ProcessError::WrongVariant { expected, got: self.variant });
        }
        self.validate()
    }
}

/// Result of one run.
///
/// For the order-driven variants `accepted[i]` says whether the i-th
/// traversed edge was kept. The removal variants leave it empty and count
/// removals in `steps_traversed`; their digest covers the removal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessOutcome {
    pub variant: Variant,
    pub final_edges: usize,
    pub final_graph: HostGraph,
    pub accepted: Vec<bool>,
    pub permutation_digest: u64,
    pub steps_traversed: usize,
    pub seed: u64,
    pub replication_index: u64,
}

/// Compact JSON record of an outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub variant: Variant,
    pub n: usize,
    pub final_edges: usize,
    pub steps: usize,
    pub digest: String,
    pub seed: u64,
    pub replication_index: u64,
}

impl ProcessOutcome {
    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            variant: self.variant,
            n: self.final_graph.n(),
            final_edges: self.final_edges,
            steps: self.steps_traversed,
            digest: format!("{:016x}", self.permutation_digest),
            seed: self.seed,
            replication_index: self.replication_index,
        }
    }

    /// Positions of the kept edges in the traversal.
    pub fn accepted_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.accepted.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }
}

/// Generator for stream `stream` of replication `replication`.
pub fn stream_rng(seed: u64, replication: u64, stream: u8) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replication << 8) | u64::from(stream));
    rng
}

/// All pairs `(u, v)`, `u < v`, lexicographically.
pub fn all_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// The uniform edge order used by `reverse_addition_run` and
/// `forward_hfree_run` for this seed and replication.
pub fn edge_order(n: usize, seed: u64, replication: u64) -> Vec<(usize, usize)> {
    let mut edges = all_edges(n);
    edges.shuffle(&mut stream_rng(seed, replication, STREAM_ORDER));
    edges
}

/// FNV-1a over the vertex pairs as little-endian u32s.
pub fn order_digest(order: &[(usize, usize)]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &(u, v) in order {
        for x in [u as u32, v as u32] {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    h
}

/// The truncation point `n^(2 - 1/m2) (ln n)^2`, rounded up and capped at
/// `binom(n, 2)`. For a family the densest member decides.
pub fn default_m_cap(n: usize, patterns: &[PatternGraph]) -> Result<usize, ProcessError> {
    let mut m2 = 0.0f64;
    for h in patterns {
        m2 = m2.max(pattern_stats(h)?.m2_f64());
    }
    if patterns.is_empty() {
        return Err(ProcessError::NoPatterns);
    }
    let total = n * n.saturating_sub(1) / 2;
    let nf = n as f64;
    let m = nf.powf(2.0 - 1.0 / m2) * nf.ln().powi(2);
    Ok(if m.is_finite() { (m.ceil() as usize).min(total) } else { total })
}

/// The per-pair copy ceiling `(ln n)^(2 e_H)`.
pub fn psi(n: usize, h: &PatternGraph) -> f64 {
    (n as f64).ln().powi(2 * h.e() as i32)
}

/// Matchers for a pattern family.
#[derive(Debug, Clone)]
pub struct Family {
    matchers: Vec<Matcher>,
}

impl Family {
    pub fn new(patterns: &[PatternGraph]) -> Self {
        Family { matchers: patterns.iter().map(Matcher::new).collect() }
    }

    /// Whether `g + e` has a copy of some member that uses `e`.
    pub fn completes(&mut self, g: &HostGraph, e: (usize, usize)) -> bool {
        self.matchers.iter_mut().any(|m| m.completes_copy(g, e.0, e.1))
    }

    /// Whether every vertex pair would close a copy of some member.
    pub fn every_pair_closes(&mut self, g: &HostGraph) -> bool {
        (0..g.n()).all(|u| (u + 1..g.n()).all(|v| self.completes(g, (u, v))))
    }

    pub fn matchers_mut(&mut self) -> &mut [Matcher] {
        &mut self.matchers
    }
}

/// Runs the reverse rule on a given order: an edge is kept iff it closes no
/// copy together with all previously traversed edges, kept or not.
pub fn reverse_on_order(n: usize, family: &mut Family, order: &[(usize, usize)]) -> (HostGraph, Vec<bool>) {
    let mut traversed = HostGraph::empty(n);
    let mut kept = HostGraph::empty(n);
    let mut accepted = Vec::with_capacity(order.len());
    for &e in order {
        let keep = !family.completes(&traversed, e);
        traversed.insert_edge(e.0, e.1);
        if keep {
            kept.insert_edge(e.0, e.1);
        }
        accepted.push(keep);
    }
    (kept, accepted)
}

/// The forward rule: an edge is kept iff it closes no copy among the kept
/// edges.
pub fn forward_on_order(n: usize, family: &mut Family, order: &[(usize, usize)]) -> (HostGraph, Vec<bool>) {
    let mut kept = HostGraph::empty(n);
    let mut accepted = Vec::with_capacity(order.len());
    for &e in order {
        let keep = !family.completes(&kept, e);
        if keep {
            kept.insert_edge(e.0, e.1);
        }
        accepted.push(keep);
    }
    (kept, accepted)
}

fn outcome(cfg: &ProcessConfig, graph: HostGraph, accepted: Vec<bool>, order: &[(usize, usize)]) -> ProcessOutcome {
    ProcessOutcome {
        variant: cfg.variant,
        final_edges: graph.edge_count(),
        final_graph: graph,
        steps_traversed: order.len(),
        accepted,
        permutation_digest: order_digest(order),
        seed: cfg.seed,
        replication_index: cfg.replication_index,
    }
}

fn prefix<'a>(cfg: &ProcessConfig, order: &'a [(usize, usize)]) -> &'a [(usize, usize)] {
    &order[..cfg.m_cap.unwrap_or(order.len()).min(order.len())]
}

/// Reverse rule on the seeded uniform order, truncated at `m_cap`.
pub fn reverse_addition_run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    cfg.expect(Variant::ReverseAddition)?;
    let order = edge_order(cfg.n, cfg.seed, cfg.replication_index);
    Ok(reverse_addition_on(cfg, &order))
}

/// Reverse rule on an explicit order, truncated at `m_cap`.
pub fn reverse_addition_on(cfg: &ProcessConfig, order: &[(usize, usize)]) -> ProcessOutcome {
    let order = prefix(cfg, order);
    let (g, acc) = reverse_on_order(cfg.n, &mut Family::new(&cfg.patterns), order);
    outcome(cfg, g, acc, order)
}

pub fn forward_hfree_run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    cfg.expect(Variant::ForwardHfree)?;
    let order = edge_order(cfg.n, cfg.seed, cfg.replication_index);
    let order = prefix(cfg, &order);
    let (g, acc) = forward_on_order(cfg.n, &mut Family::new(&cfg.patterns), order);
    Ok(outcome(cfg, g, acc, order))
}

/// I.i.d. uniform birth times for all pairs, ascending, with ties redrawn.
pub fn birth_order(n: usize, seed: u64, replication: u64) -> Vec<((usize, usize), f64)> {
    let mut rng = stream_rng(seed, replication, STREAM_BIRTH);
    let mut timed: Vec<((usize, usize), f64)> = all_edges(n).into_iter().map(|e| (e, rng.random::<f64>())).collect();
    loop {
        timed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut clash = false;
        for i in 1..timed.len() {
            if timed[i].1 == timed[i - 1].1 {
                timed[i - 1].1 = rng.random();
                timed[i].1 = rng.random();
                clash = true;
            }
        }
        if !clash {
            return timed;
        }
    }
}

/// Reverse rule over the edges born by `p_cap` (default 1), in birth order.
pub fn birth_time_run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    cfg.expect(Variant::BirthTime)?;
    let cutoff = cfg.p_cap.unwrap_or(1.0);
    let order: Vec<(usize, usize)> =
        birth_order(cfg.n, cfg.seed, cfg.replication_index).into_iter().take_while(|&(_, b)| b <= cutoff).map(|(e, _)| e).collect();
    let order = prefix(cfg, &order);
    let (g, acc) = reverse_on_order(cfg.n, &mut Family::new(&cfg.patterns), order);
    Ok(outcome(cfg, g, acc, order))
}

/// From `K_n`, repeatedly deletes a uniform edge among those lying in a
/// copy of some member until none is left.
pub fn reverse_removal_run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    cfg.expect(Variant::ReverseRemoval)?;
    let mut rng = stream_rng(cfg.seed, cfg.replication_index, STREAM_REMOVAL);
    let mut family = Family::new(&cfg.patterns);
    let mut g = HostGraph::complete(cfg.n);
    // graphs only shrink, so an edge that leaves the live set never returns
    let mut live: Vec<(usize, usize)> = all_edges(cfg.n);
    let mut removed = Vec::new();
    loop {
        live.retain(|&e| family.completes(&g, e));
        if live.is_empty() {
            break;
        }
        let e = live.swap_remove(rng.random_range(0..live.len()));
        live.sort_unstable();
        g.remove_edge(e.0, e.1);
        removed.push(e);
    }
    Ok(outcome(cfg, g, Vec::new(), &removed))
}

/// Repeatedly deletes all edges of a uniform copy of the pattern.
pub fn h_removal_run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    cfg.expect(Variant::HRemoval)?;
    let mut rng = stream_rng(cfg.seed, cfg.replication_index, STREAM_REMOVAL);
    let mut matcher = Matcher::new(&cfg.patterns[0]);
    let mut g = HostGraph::complete(cfg.n);
    let mut copies = matcher.copies(&g);
    let mut removed = Vec::new();
    while !copies.is_empty() {
        let copy = copies.swap_remove(rng.random_range(0..copies.len()));
        for &(u, v) in &copy {
            g.remove_edge(u, v);
        }
        removed.extend_from_slice(&copy);
        copies.retain(|c| c.iter().all(|&(u, v)| g.has_edge(u, v)));
        copies.sort_unstable();
    }
    Ok(outcome(cfg, g, Vec::new(), &removed))
}

/// Dispatches on `cfg.variant`.
pub fn run(cfg: &ProcessConfig) -> Result<ProcessOutcome, ProcessError> {
    match cfg.variant {
        Variant::ReverseAddition => reverse_addition_run(cfg),
        Variant::ReverseRemoval => reverse_removal_run(cfg),
        Variant::BirthTime => birth_time_run(cfg),
        Variant::ForwardHfree => forward_hfree_run(cfg),
        Variant::HRemoval => h_removal_run(cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    Identity,
    /// Exchange positions `i` and `j` of the full order. With `j` past the
    /// truncation point this swaps a traversed edge for an untraversed one.
    Swap(usize, usize),
    /// Put another edge at position `i`. It may occur past the truncation
    /// point but not elsewhere in the traversed prefix.
    Replace(usize, (usize, usize)),
}

impl Perturbation {
    pub fn apply(&self, base: &[(usize, usize)]) -> Result<Vec<(usize, usize)>, ProcessError> {
        let mut seq = base.to_vec();
        let len = seq.len();
        match *self {
            Perturbation::Identity => {}
            Perturbation::Swap(i, j) => {
                for k in [i, j] {
                    if k >= len {
                        return Err(ProcessError::BadPosition { index: k, len });
                    }
                }
                seq.swap(i, j);
            }
            Perturbation::Replace(i, (u, v)) => {
                if i >= len {
                    return Err(ProcessError::BadPosition { index: i, len });
                }
                seq[i] = (u.min(v), u.max(v));
            }
        }
        Ok(seq)
    }
}

/// Runs the truncated reverse rule on `base` and on its perturbation.
pub fn perturb_and_rerun(
    cfg: &ProcessConfig,
    base: &[(usize, usize)],
    perturbation: Perturbation,
) -> Result<(ProcessOutcome, ProcessOutcome), ProcessError> {
    cfg.expect(Variant::ReverseAddition)?;
    let m = cfg.m_cap.unwrap_or(base.len()).min(base.len());
    let other = perturbation.apply(base)?;
    let mut seen = HostGraph::empty(cfg.n);
    for &(u, v) in &other[..m] {
        if u >= cfg.n || v >= cfg.n || u == v {
            return Err(GraphError::VertexOutOfRange { vertex: u.max(v), n: cfg.n }.into());
        }
        if !seen.insert_edge(u, v) {
            return Err(ProcessError::DuplicateEdge(u, v));
        }
    }
    let cfg = cfg.clone().truncated(m);
    Ok((reverse_addition_on(&cfg, base), reverse_addition_on(&cfg, &other)))
}

/// Draws a random perturbation of `order` whose first `m` entries are
/// traversed: half the time (when possible) a prefix edge is replaced by a
/// pair outside the prefix, otherwise a prefix position is swapped with any
/// other position.
pub fn random_perturbation<R: Rng>(
    rng: &mut R,
    n: usize,
    order: &[(usize, usize)],
    m: usize,
) -> Perturbation {
    let len = order.len();
    let m = m.min(len);
    let total = n * n.saturating_sub(1) / 2;
    if len < 2 || m == 0 {
        return Perturbation::Identity;
    }
    if m < total && rng.random_bool(0.5) {
        let prefix: std::collections::HashSet<_> = order[..m].iter().copied().collect();
        loop {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && !prefix.contains(&(u.min(v), u.max(v))) {
                return Perturbation::Replace(rng.random_range(0..m), (u.min(v), u.max(v)));
            }
        }
    }
    let i = rng.random_range(0..m);
    let mut j = rng.random_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    Perturbation::Swap(i, j)
}
