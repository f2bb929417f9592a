use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::GraphError;

/// Largest pattern accepted by default.
pub const MAX_PATTERN_VERTICES: usize = 8;

/// A small forbidden graph `H`. Isolated vertices are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternSpec", into = "PatternSpec")]
pub struct PatternGraph {
    name: Option<String>,
    v: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u8>,
    aut_count: u64,
    /// Arc orbit representatives `(a, b)` with the orbit size.
    arc_orbits: Vec<(usize, usize, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    v: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<PatternSpec> for PatternGraph {
    type Error = GraphError;

    fn try_from(spec: PatternSpec) -> Result<Self, GraphError> {
        let mut p = PatternGraph::new(spec.v, &spec.edges)?;
        p.name = spec.name;
        Ok(p)
    }
}

impl From<PatternGraph> for PatternSpec {
    fn from(p: PatternGraph) -> Self {
        PatternSpec { name: p.name, v: p.v, edges: p.edges }
    }
}

impl PatternGraph {
    pub fn new(v: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if v > MAX_PATTERN_VERTICES {
            return Err(GraphError::PatternTooLarge { v, cap: MAX_PATTERN_VERTICES });
        }
        let mut adj = vec![0u8; v];
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= v || b >= v {
                return Err(GraphError::VertexOutOfRange { vertex: a.max(b), n: v });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if adj[a] & (1 << b) != 0 {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();

        let automorphisms: Vec<Vec<usize>> = (0..v)
            .permutations(v)
            .filter(|perm| norm.iter().all(|&(a, b)| adj[perm[a]] & (1 << perm[b]) != 0))
            .collect();
        let aut_count = automorphisms.len() as u64;

        let mut seen = vec![false; v * v];
        let mut arc_orbits = Vec::new();
        for &(a, b) in &norm {
            for (x, y) in [(a, b), (b, a)] {
                if seen[x * v + y] {
                    continue;
                }
                let mut size = 0;
                for perm in &automorphisms {
                    let idx = perm[x] * v + perm[y];
                    if !seen[idx] {
                        seen[idx] = true;
                        size += 1;
                    }
                }
                arc_orbits.push((x, y, size));
            }
        }

        Ok(PatternGraph { name: None, v, edges: norm, adj, aut_count, arc_orbits })
    }

    pub fn named(name: &str) -> Result<Self, GraphError> {
        let cycle = |k: usize| (0..k).map(|i| (i, (i + 1) % k)).collect::<Vec<_>>();
        let complete = |k: usize| (0..k).tuple_combinations().collect::<Vec<_>>();
        let (v, edges) = match name.to_ascii_uppercase().as_str() {
            "K2" => (2, complete(2)),
            "K3" | "C3" => (3, complete(3)),
            "K4" => (4, complete(4)),
            "K5" => (5, complete(5)),
            "C4" => (4, cycle(4)),
            "C5" => (5, cycle(5)),
            "C6" => (6, cycle(6)),
            "P3" => (3, vec![(0, 1), (1, 2)]),
            "2K2" => (4, vec![(0, 1), (2, 3)]),
            "K4+PENDANT" => {
                let mut e = complete(4);
                e.push((3, 4));
                (5, e)
            }
            _ => return Err(GraphError::UnknownPattern(name.to_string())),
        };
        let mut p = Self::new(v, &edges)?;
        p.name = Some(name.to_string());
        Ok(p)
    }

    pub const NAMES: [&'static str; 10] =
        ["K2", "K3", "K4", "K5", "C4", "C5", "C6", "P3", "2K2", "K4+pendant"];

    /// Parses the edge-list format: a vertex count line, then `u v` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(GraphError::Parse { line: 0, message: "empty pattern".into() })?;
        let v: usize = header
            .parse()
            .map_err(|_| GraphError::Parse { line, message: format!("expected vertex count, got {header:?}") })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let parsed: Option<(usize, usize)> = match parts.as_slice() {
                [a, b] => a.parse().ok().zip(b.parse().ok()),
                _ => None,
            };
            let edge = parsed.ok_or(GraphError::Parse { line, message: format!("expected `u v`, got {l:?}") })?;
            edges.push(edge);
        }
        Self::new(v, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.v);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("H(v={}, e={})", self.v, self.edges.len()))
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn aut_count(&self) -> u64 {
        self.aut_count
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn degree(&self, a: usize) -> u32 {
        self.adj[a].count_ones()
    }

    pub(crate) fn arc_orbits(&self) -> &[(usize, usize, u64)] {
        &self.arc_orbits
    }

    /// Number of edges induced by the vertex set `mask`.
    fn induced_edges(&self, mask: u32) -> i64 {
        self.edges.iter().filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0).count() as i64
    }
}

impl FromStr for PatternGraph {
    type Err = GraphError;

    /// A built-in name, or the edge-list format.
    fn from_str(s: &str) -> Result<Self, GraphError> {
        match Self::named(s.trim()) {
            Ok(p) => Ok(p),
            Err(GraphError::UnknownPattern(_)) if s.contains('\n') => Self::parse(s),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Densities and balancedness of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternStats {
    pub v: usize,
    pub e: usize,
    pub d2: Ratio<i64>,
    pub m2: Ratio<i64>,
    pub two_balanced: bool,
    pub strictly_two_balanced: bool,
    pub extbal: bool,
}

impl PatternStats {
    pub fn d2_f64(&self) -> f64 {
        ratio_f64(self.d2)
    }

    pub fn m2_f64(&self) -> f64 {
        ratio_f64(self.m2)
    }
}

pub(crate) fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `(e - 1) / (v - 2)`, with the convention `d2(K2) = 1/2`.
pub fn d2(v: usize, e: usize) -> Ratio<i64> {
    if v == 2 && e == 1 {
        return Ratio::new(1, 2);
    }
    Ratio::new(e as i64 - 1, v as i64 - 2)
}

/// Densities of `H`. For a fixed vertex set the induced subgraph has the
/// largest 2-density, and adding isolated vertices only lowers it, so
/// maxima over subgraphs reduce to maxima over induced vertex subsets.
pub fn pattern_stats(h: &PatternGraph) -> Result<PatternStats, GraphError> {
    let (v, e) = (h.v(), h.e());
    if e == 0 {
        return Err(GraphError::NoEdges);
    }
    let d2_h = d2(v, e);
    let full = (1u32 << v) - 1;
    let mut m2 = Ratio::new(1, 2);
    let mut two_balanced = e >= 2;
    let mut strictly = e >= 2;
    for mask in 1..=full {
        let size = mask.count_ones() as usize;
        let edges = h.induced_edges(mask);
        if size < 2 || edges == 0 {
            continue;
        }
        let dens = d2(size, edges as usize);
        m2 = m2.max(dens);
        if mask != full && size >= 3 {
            if dens > d2_h {
                two_balanced = false;
            }
            if dens >= d2_h {
                strictly = false;
            }
        }
    }
    let extbal = (v >= 4 && m2 < Ratio::new(2 * e as i64 - 3, 2 * v as i64 - 6)) || (v == 3 && e >= 2);
    Ok(PatternStats {
        v,
        e,
        d2: d2_h,
        m2,
        two_balanced,
        strictly_two_balanced: strictly && two_balanced,
        extbal,
    })
}
