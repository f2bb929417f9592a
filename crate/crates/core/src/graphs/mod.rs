//! Small forbidden patterns, their densities, and copy detection/counting
//! in a host graph.

mod host;
mod matcher;
mod pattern;

use thiserror::Error;

pub use host::HostGraph;
pub use matcher::Matcher;
pub use pattern::{d2, pattern_stats, PatternGraph, PatternStats, MAX_PATTERN_VERTICES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("pattern has {v} vertices, cap is {cap}")]
    PatternTooLarge { v: usize, cap: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("pattern has no edges")]
    NoEdges,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown pattern {0:?}; built-in names are K2, K3, K4, K5, C4, C5, C6, P3, 2K2, K4+pendant")]
    UnknownPattern(String),
}

/// Whether `g + e` contains a copy of `h` that uses `e`.
pub fn completes_copy(g: &HostGraph, h: &PatternGraph, e: (usize, usize)) -> bool {
    Matcher::new(h).completes_copy(g, e.0, e.1)
}

/// Number of copies of `h` in `g + e` containing `e`.
pub fn count_copies_with_edge(g: &HostGraph, h: &PatternGraph, e: (usize, usize)) -> u64 {
    Matcher::new(h).count_with_edge(g, e.0, e.1)
}

pub fn count_copies_total(g: &HostGraph, h: &PatternGraph) -> u64 {
    Matcher::new(h).count_total(g)
}

pub fn max_codegree(g: &HostGraph) -> u32 {
    g.max_codegree()
}

/// Extremes of the per-pair extension counts: over all vertex pairs `xy`,
/// the number of copies of the pattern containing `xy` in `g + xy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionExtremes {
    pub min: u64,
    pub max: u64,
}

impl ExtensionExtremes {
    /// At most `psi` copies through every pair.
    pub fn bounded_by(&self, psi: f64) -> bool {
        self.max as f64 <= psi
    }

    /// At least one copy through every pair.
    pub fn every_pair_closes(&self) -> bool {
        self.min >= 1
    }
}

pub fn extension_extremes(g: &HostGraph, matcher: &mut Matcher) -> ExtensionExtremes {
    let mut out = ExtensionExtremes { min: u64::MAX, max: 0 };
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let c = matcher.count_with_edge(g, u, v);
            out.min = out.min.min(c);
            out.max = out.max.max(c);
        }
    }
    if out.min == u64::MAX {
        out.min = 0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(s: &str) -> PatternGraph {
        PatternGraph::named(s).unwrap()
    }

    #[test]
    fn completes_examples() {
        let path = HostGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(completes_copy(&path, &named("K3"), (0, 2)));
        for h in ["K3", "C4", "P3", "2K2", "K4+pendant"] {
            assert!(!completes_copy(&HostGraph::empty(8), &named(h), (2, 5)), "{h}");
        }
        let c5 = HostGraph::cycle(5);
        assert!(completes_copy(&c5, &named("C4"), (0, 2)));
        assert!(!completes_copy(&c5, &named("K3"), (0, 1)));
        // a single edge plus isolated vertices closes on any big enough host
        let k2_iso = PatternGraph::new(4, &[(0, 1)]).unwrap();
        assert!(completes_copy(&HostGraph::empty(4), &k2_iso, (0, 3)));
        assert!(!completes_copy(&HostGraph::empty(3), &k2_iso, (0, 2)));
    }

    #[test]
    fn count_examples() {
        let k3 = named("K3");
        assert_eq!(count_copies_with_edge(&HostGraph::complete(4), &k3, (0, 1)), 2);
        assert_eq!(count_copies_with_edge(&HostGraph::complete(5), &k3, (1, 3)), 3);
        assert_eq!(count_copies_with_edge(&HostGraph::empty(5), &k3, (1, 3)), 0);
        assert_eq!(count_copies_total(&HostGraph::complete(4), &k3), 4);
        assert_eq!(count_copies_total(&HostGraph::cycle(5), &k3), 0);
        assert_eq!(count_copies_total(&HostGraph::complete(4), &named("C4")), 3);
        assert_eq!(count_copies_total(&HostGraph::complete(6), &named("2K2")), 45);
        assert_eq!(count_copies_total(&HostGraph::petersen(), &named("C5")), 12);
    }

    #[test]
    fn absent_edge_counts_as_virtual() {
        // K4 minus {0,1}: adding it back restores both triangles through it
        let mut g = HostGraph::complete(4);
        g.remove_edge(0, 1);
        assert_eq!(count_copies_with_edge(&g, &named("K3"), (0, 1)), 2);
        assert_eq!(count_copies_total(&g, &named("K3")), 2);
    }

    #[test]
    fn extremes() {
        let mut m = Matcher::new(&named("K3"));
        let ext = extension_extremes(&HostGraph::complete(6), &mut m);
        assert_eq!(ext, ExtensionExtremes { min: 4, max: 4 });
        assert!(ext.every_pair_closes() && ext.bounded_by(4.0) && !ext.bounded_by(3.5));
        let ext = extension_extremes(&HostGraph::empty(6), &mut m);
        assert_eq!(ext, ExtensionExtremes { min: 0, max: 0 });
    }

    #[test]
    fn copy_lists() {
        let mut m = Matcher::new(&named("K3"));
        let copies = m.copies(&HostGraph::complete(4));
        assert_eq!(copies.len(), 4);
        assert_eq!(copies[0], vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(Matcher::new(&named("C4")).copies(&HostGraph::complete(5)).len(), 15);
        assert!(Matcher::new(&named("K3")).copies(&HostGraph::petersen()).is_empty());
    }

    #[test]
    fn codegree_examples() {
        assert_eq!(max_codegree(&HostGraph::complete(9)), 7);
        assert_eq!(max_codegree(&HostGraph::empty(9)), 0);
        assert_eq!(max_codegree(&HostGraph::petersen()), 1);
    }
}
