//! Backtracking embeddings of a pattern into a host graph, optionally with
//! one virtual extra edge.

use super::host::HostGraph;
use super::pattern::PatternGraph;

/// Exploration order for one search: `order[i]` is the pattern vertex mapped
/// at depth `i`, `back[i]` the earlier depths adjacent to it.
#[derive(Debug, Clone)]
struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
    degree: Vec<u32>,
    weight: u64,
}

impl Plan {
    fn new(h: &PatternGraph, start: &[usize], weight: u64) -> Self {
        let v = h.v();
        let mut order: Vec<usize> = start.to_vec();
        let mut placed = vec![false; v];
        for &s in start {
            placed[s] = true;
        }
        while order.len() < v {
            let next = (0..v)
                .filter(|&u| !placed[u])
                .max_by_key(|&u| {
                    let links = order.iter().filter(|&&w| h.has_edge(u, w)).count();
                    (links, h.degree(u), std::cmp::Reverse(u))
                })
                .expect("unplaced vertex exists");
            placed[next] = true;
            order.push(next);
        }
        let back = (0..v).map(|i| (0..i).filter(|&j| h.has_edge(order[i], order[j])).collect()).collect();
        let degree = order.iter().map(|&u| h.degree(u)).collect();
        Plan { order, back, degree, weight }
    }
}

/// The host graph plus an optional virtual edge.
#[derive(Clone, Copy)]
struct View<'g> {
    g: &'g HostGraph,
    extra: Option<(usize, usize)>,
    extra_is_new: bool,
}

impl<'g> View<'g> {
    fn new(g: &'g HostGraph, extra: Option<(usize, usize)>) -> Self {
        let extra_is_new = extra.is_some_and(|(x, y)| !g.has_edge(x, y));
        View { g, extra, extra_is_new }
    }

    fn degree(&self, u: usize) -> u32 {
        let bump = match self.extra {
            Some((x, y)) if self.extra_is_new && (u == x || u == y) => 1,
            _ => 0,
        };
        self.g.degree(u) + bump
    }
}

/// Scratch space reused across searches.
#[derive(Debug, Clone, Default)]
struct Buffers {
    words: usize,
    candidates: Vec<u64>,
    row: Vec<u64>,
    used: Vec<u64>,
    mapped: Vec<usize>,
}

/// Reusable search state for one pattern.
#[derive(Debug, Clone)]
pub struct Matcher {
    pattern: PatternGraph,
    edge_plans: Vec<Plan>,
    free_plan: Plan,
    buf: Buffers,
}

impl Matcher {
    pub fn new(pattern: &PatternGraph) -> Self {
        let edge_plans =
            pattern.arc_orbits().iter().map(|&(a, b, size)| Plan::new(pattern, &[a, b], size)).collect();
        let start: Vec<usize> = (0..pattern.v())
            .max_by_key(|&u| (pattern.degree(u), std::cmp::Reverse(u)))
            .into_iter()
            .collect();
        let free_plan = Plan::new(pattern, &start, 1);
        let buf = Buffers { mapped: vec![0; pattern.v()], ..Default::default() };
        Matcher { pattern: pattern.clone(), edge_plans, free_plan, buf }
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    /// Whether `g + {x, y}` contains a copy of the pattern using `{x, y}`.
    pub fn completes_copy(&mut self, g: &HostGraph, x: usize, y: usize) -> bool {
        self.with_edge(g, x, y, true) > 0
    }

    /// Copies of the pattern in `g + {x, y}` that contain `{x, y}`.
    pub fn count_with_edge(&mut self, g: &HostGraph, x: usize, y: usize) -> u64 {
        let embeddings = self.with_edge(g, x, y, false);
        debug_assert_eq!(embeddings % self.pattern.aut_count(), 0);
        embeddings / self.pattern.aut_count()
    }

    /// Injective embeddings of the pattern into `g` (every copy is counted
    /// `aut_count` times).
    pub fn count_embeddings(&mut self, g: &HostGraph) -> u64 {
        if self.pattern.v() > g.n() {
            return 0;
        }
        self.buf.prepare(g, self.pattern.v());
        let view = View::new(g, None);
        self.buf.search(&self.free_plan, &view, 0, false)
    }

    pub fn count_total(&mut self, g: &HostGraph) -> u64 {
        self.count_embeddings(g) / self.pattern.aut_count()
    }

    /// Every copy of the pattern in `g` as its sorted edge list, in
    /// lexicographic order.
    pub fn copies(&mut self, g: &HostGraph) -> Vec<Vec<(usize, usize)>> {
        if self.pattern.v() > g.n() || self.pattern.e() == 0 {
            return Vec::new();
        }
        self.buf.prepare(g, self.pattern.v());
        let view = View::new(g, None);
        let mut maps = Vec::new();
        self.buf.enumerate(&self.free_plan, &view, 0, &mut maps);
        let order = &self.free_plan.order;
        let mut out: Vec<Vec<(usize, usize)>> = maps
            .into_iter()
            .map(|m| {
                let mut image = vec![0; m.len()];
                for (depth, &u) in order.iter().enumerate() {
                    image[u] = m[depth];
                }
                let mut edges: Vec<_> =
                    self.pattern.edges().iter().map(|&(a, b)| (image[a].min(image[b]), image[a].max(image[b]))).collect();
                edges.sort_unstable();
                edges
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Weighted embedding count over arc orbits, with `x -> a`, `y -> b`.
    fn with_edge(&mut self, g: &HostGraph, x: usize, y: usize, stop_first: bool) -> u64 {
        if x == y || self.pattern.e() == 0 || self.pattern.v() > g.n() {
            return 0;
        }
        let buf = &mut self.buf;
        buf.prepare(g, self.pattern.v());
        let view = View::new(g, Some((x, y)));
        let mut total = 0;
        for plan in &self.edge_plans {
            if view.degree(x) < plan.degree[0] || view.degree(y) < plan.degree[1] {
                continue;
            }
            buf.mapped[0] = x;
            buf.mapped[1] = y;
            set_bit(&mut buf.used, x);
            set_bit(&mut buf.used, y);
            let found = buf.search(plan, &view, 2, stop_first);
            clear_bit(&mut buf.used, x);
            clear_bit(&mut buf.used, y);
            if stop_first && found > 0 {
                return 1;
            }
            total += found * plan.weight;
        }
        total
    }
}

impl Buffers {
    fn prepare(&mut self, g: &HostGraph, v: usize) {
        let words = g.words();
        if self.words != words {
            self.words = words;
            self.candidates = vec![0; words * v.max(1)];
            self.row = vec![0; words];
            self.used = vec![0; words];
        }
        self.used.iter_mut().for_each(|w| *w = 0);
    }

    fn search(&mut self, plan: &Plan, view: &View, depth: usize, stop_first: bool) -> u64 {
        if depth == plan.order.len() {
            return 1;
        }
        self.fill_candidates(plan, view, depth);
        let words = self.words;
        let need = plan.degree[depth];
        let mut count = 0;
        for wi in 0..words {
            let mut w = self.candidates[depth * words + wi];
            while w != 0 {
                let c = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                if view.degree(c) < need {
                    continue;
                }
                self.mapped[depth] = c;
                set_bit(&mut self.used, c);
                let found = self.search(plan, view, depth + 1, stop_first);
                clear_bit(&mut self.used, c);
                count += found;
                if stop_first && count > 0 {
                    return count;
                }
            }
        }
        count
    }

    fn enumerate(&mut self, plan: &Plan, view: &View, depth: usize, out: &mut Vec<Vec<usize>>) {
        if depth == plan.order.len() {
            out.push(self.mapped.clone());
            return;
        }
        self.fill_candidates(plan, view, depth);
        let words = self.words;
        for wi in 0..words {
            let mut w = self.candidates[depth * words + wi];
            while w != 0 {
                let c = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                if view.degree(c) < plan.degree[depth] {
                    continue;
                }
                self.mapped[depth] = c;
                set_bit(&mut self.used, c);
                self.enumerate(plan, view, depth + 1, out);
                clear_bit(&mut self.used, c);
            }
        }
    }

    fn fill_candidates(&mut self, plan: &Plan, view: &View, depth: usize) {
        let words = self.words;
        let n = view.g.n();
        {
            let (cand, row) = (&mut self.candidates[depth * words..(depth + 1) * words], &mut self.row);
            if plan.back[depth].is_empty() {
                cand.iter_mut().for_each(|w| *w = !0);
                let tail = n % 64;
                if tail != 0 {
                    cand[words - 1] = (1u64 << tail) - 1;
                }
            } else {
                for (i, &j) in plan.back[depth].iter().enumerate() {
                    load_row(view, self.mapped[j], row);
                    if i == 0 {
                        cand.copy_from_slice(row);
                    } else {
                        cand.iter_mut().zip(row.iter()).for_each(|(c, r)| *c &= *r);
                    }
                }
            }
            cand.iter_mut().zip(&self.used).for_each(|(c, u)| *c &= !*u);
        }
    }
}

fn load_row(view: &View, u: usize, out: &mut [u64]) {
    out.copy_from_slice(view.g.row(u));
    match view.extra {
        Some((x, y)) if u == x => set_bit(out, y),
        Some((x, y)) if u == y => set_bit(out, x),
        _ => {}
    }
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

fn clear_bit(words: &mut [u64], i: usize) {
    words[i / 64] &= !(1 << (i % 64));
}
