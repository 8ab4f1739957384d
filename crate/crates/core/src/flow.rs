//! Maximum flow (Dinic) on real capacities, minimum vertex cuts by vertex
//! splitting, and weighted vertex connectivity.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Residual capacities at or below this are treated as saturated.
pub const FLOW_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    /// Nonnegative, possibly `f64::INFINITY`.
    pub capacity: f64,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes && source != sink);
        FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: f64) -> usize {
        assert!(tail < self.nodes && head < self.nodes);
        assert!(capacity >= 0.0, "negative capacity {capacity}");
        self.arcs.push(Arc { tail, head, capacity });
        self.arcs.len() - 1
    }

    pub fn set_capacity(&mut self, arc: usize, capacity: f64) {
        assert!(capacity >= 0.0, "negative capacity {capacity}");
        self.arcs[arc].capacity = capacity;
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }
}

#[derive(Clone, Debug)]
pub struct CutResult {
    /// Capacity of the cut; `f64::INFINITY` if every cut crosses an infinite arc.
    pub value: f64,
    /// Nodes reachable from the source in the final residual network.
    pub source_side: Vec<bool>,
}

impl CutResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn bfs_levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1i64; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if self.cap[e] > FLOW_EPS && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[i64], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.head[e];
            if self.cap[e] > FLOW_EPS && level[v] == level[u] + 1 {
                let pushed = self.push(v, t, limit.min(self.cap[e]), level, next);
                if pushed > FLOW_EPS {
                    self.cap[e] -= pushed;
                    self.cap[e ^ 1] += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }
}

/// Computes a maximum flow and the minimum cut formed by the residual
/// reachable set of the source.
pub fn max_flow_min_cut(net: &FlowNetwork) -> CutResult {
    let finite: f64 = net
        .arcs
        .iter()
        .filter(|a| a.capacity.is_finite())
        .map(|a| a.capacity)
        .sum();
    let sentinel = 2.0 * finite + 1.0;

    let mut res = Residual {
        head: Vec::with_capacity(2 * net.arcs.len()),
        cap: Vec::with_capacity(2 * net.arcs.len()),
        adj: vec![Vec::new(); net.nodes],
    };
    for a in &net.arcs {
        let c = if a.capacity.is_finite() { a.capacity } else { sentinel };
        res.adj[a.tail].push(res.head.len());
        res.head.push(a.head);
        res.cap.push(c);
        res.adj[a.head].push(res.head.len());
        res.head.push(a.tail);
        res.cap.push(0.0);
    }

    let (s, t) = (net.source, net.sink);
    let mut flow = 0.0;
    loop {
        let level = res.bfs_levels(s);
        if level[t] < 0 {
            break;
        }
        let mut next = vec![0usize; net.nodes];
        loop {
            let pushed = res.push(s, t, f64::INFINITY, &level, &mut next);
            if pushed <= FLOW_EPS {
                break;
            }
            flow += pushed;
        }
        if flow >= sentinel {
            break;
        }
    }

    let level = res.bfs_levels(s);
    let source_side: Vec<bool> = level.iter().map(|&l| l >= 0).collect();
    let mut value = 0.0;
    for a in &net.arcs {
        if source_side[a.tail] && !source_side[a.head] {
            value += a.capacity;
        }
    }
    if value.is_finite() {
        let scale = 1.0 + value.abs();
        debug_assert!(
            (value - flow).abs() <= 1e-6 * scale,
            "max flow {flow} differs from cut {value}"
        );
    }
    CutResult { value, source_side }
}

/// Minimum-cost vertex set separating `s` from `t`, using only vertices
/// flagged in `active`.
pub(crate) fn min_vertex_cut_within(
    g: &Graph,
    costs: &[f64],
    active: &[bool],
    s: usize,
    t: usize,
) -> (f64, VertexSet) {
    let n = g.n();
    // Vertex v becomes the arc (2v -> 2v+1).
    let mut net = FlowNetwork::new(2 * n, 2 * s + 1, 2 * t);
    for v in 0..n {
        if !active[v] {
            continue;
        }
        let cap = if v == s || v == t { f64::INFINITY } else { costs[v].max(0.0) };
        net.add_arc(2 * v, 2 * v + 1, cap);
        for &w in g.neighbors(v) {
            if active[w] {
                net.add_arc(2 * v + 1, 2 * w, f64::INFINITY);
            }
        }
    }
    let cut = max_flow_min_cut(&net);
    let set: VertexSet = (0..n)
        .filter(|&v| active[v] && cut.source_side[2 * v] && !cut.source_side[2 * v + 1])
        .collect();
    (cut.value, set)
}

/// Minimum-cost set of vertices (other than `s` and `t`) whose removal
/// separates `s` from `t`.
pub fn min_vertex_cut(g: &Graph, costs: &[f64], s: usize, t: usize) -> Result<(f64, VertexSet)> {
    if s == t || s >= g.n() || t >= g.n() {
        return Err(Error::InvalidInput(format!("bad terminal pair ({s}, {t})")));
    }
    if g.has_edge(s, t) {
        return Err(Error::InvalidInput(format!(
            "vertices {} and {} are adjacent; no vertex cut separates them",
            s + 1,
            t + 1
        )));
    }
    Ok(min_vertex_cut_within(g, costs, &vec![true; g.n()], s, t))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Connectivity {
    /// Cheapest vertex set whose removal disconnects some component.
    Cut { cost: f64, set: VertexSet },
    /// Every connected component is a clique.
    Unbreakable,
}

impl Connectivity {
    pub fn cost(&self) -> Option<f64> {
        match self {
            Connectivity::Cut { cost, .. } => Some(*cost),
            Connectivity::Unbreakable => None,
        }
    }
}

/// Cheapest vertex set disconnecting the given component of the graph with
/// the `removed` vertices deleted, or `None` if the component is a clique.
///
/// Takes the lowest-index vertex `u` of the component as one terminal against
/// every non-adjacent vertex, then does the same for each neighbor of `u`. An
/// inclusion-minimal optimal separator either avoids `u` (first pass) or
/// contains it, in which case some neighbor of `u` survives it (second pass).
pub fn component_breaking_cut(
    g: &Graph,
    costs: &[f64],
    removed: &[bool],
    component: &VertexSet,
) -> Option<(f64, VertexSet)> {
    if g.is_clique(component) {
        return None;
    }
    let n = g.n();
    let mut active = vec![false; n];
    for v in component.iter() {
        if !removed[v] {
            active[v] = true;
        }
    }
    let u = component.as_slice()[0];
    let mut sources = vec![u];
    sources.extend(g.neighbors(u).iter().copied().filter(|&w| active[w]));

    let mut best: Option<(f64, VertexSet)> = None;
    for &a in &sources {
        for b in component.iter() {
            if b == a || g.has_edge(a, b) {
                continue;
            }
            let (cost, set) = min_vertex_cut_within(g, costs, &active, a, b);
            if best.as_ref().map_or(true, |(c, _)| cost < c - FLOW_EPS) {
                best = Some((cost, set));
            }
        }
    }
    best
}

/// The minimum cost of a vertex set whose removal disconnects one connected
/// component, taken over all components.
pub fn weighted_vertex_connectivity(g: &Graph, costs: &[f64]) -> Connectivity {
    let removed = vec![false; g.n()];
    let mut best: Option<(f64, VertexSet)> = None;
    for comp in g.components_masked(&removed) {
        if let Some((cost, set)) = component_breaking_cut(g, costs, &removed, &comp) {
            if best.as_ref().map_or(true, |(c, _)| cost < c - FLOW_EPS) {
                best = Some((cost, set));
            }
        }
    }
    match best {
        Some((cost, set)) => Connectivity::Cut { cost, set },
        None => Connectivity::Unbreakable,
    }
}
