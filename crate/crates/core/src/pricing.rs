//! Column pricing by minimum cuts.
//!
//! Network nodes are the source, the sink, one node per vertex and one per
//! family clique. A vertex gains its cover dual on the source arc, a clique
//! charges its packing dual on the sink arc, and infinite vertex-to-clique
//! arcs force every clique met by the chosen subset onto the source side. The
//! source side of a minimum cut is then a subset maximizing the dual gain.

use rayon::prelude::*;

use crate::flow::{max_flow_min_cut, FlowNetwork};
use crate::graph::{Graph, VertexSet};
use crate::master::{CliqueFamily, DualPrices};

/// A column must violate its dual constraint by more than this.
pub const VIOLATION_TOL: f64 = 1e-6;

/// Branching decisions on the cut variables of one node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchState {
    fixed_to_cut: VertexSet,
    fixed_to_keep: VertexSet,
}

impl BranchState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fixed_to_cut(&self) -> &VertexSet {
        &self.fixed_to_cut
    }

    pub fn fixed_to_keep(&self) -> &VertexSet {
        &self.fixed_to_keep
    }

    /// `Some(true)` if `v` must be cut, `Some(false)` if it must survive.
    pub fn fixing(&self, v: usize) -> Option<bool> {
        if self.fixed_to_cut.contains(v) {
            Some(true)
        } else if self.fixed_to_keep.contains(v) {
            Some(false)
        } else {
            None
        }
    }

    /// Records a fixing; returns false if it contradicts an existing one.
    pub fn fix(&mut self, v: usize, cut: bool) -> bool {
        match self.fixing(v) {
            Some(existing) => existing == cut,
            None => {
                if cut {
                    self.fixed_to_cut.insert(v);
                } else {
                    self.fixed_to_keep.insert(v);
                }
                true
            }
        }
    }

    pub fn num_fixed(&self) -> usize {
        self.fixed_to_cut.len() + self.fixed_to_keep.len()
    }

    /// Whether a subset column is compatible with the fixings: it avoids the
    /// cut vertices, and a surviving vertex adjacent to it must belong to it.
    pub fn admits(&self, g: &Graph, s: &VertexSet) -> bool {
        if s.intersects(&self.fixed_to_cut) {
            return false;
        }
        self.fixed_to_keep
            .iter()
            .all(|v| s.contains(v) || !g.neighbors(v).iter().any(|&w| s.contains(w)))
    }
}

pub(crate) fn vertex_node(v: usize) -> usize {
    2 + v
}

/// Builds the pricing network. `boosted` raises the source arc of one vertex
/// by the cardinality dual.
pub fn build_network(
    g: &Graph,
    family: &CliqueFamily,
    duals: &DualPrices,
    bs: &BranchState,
    boosted: Option<usize>,
) -> FlowNetwork {
    let n = g.n();
    let clique_node = |c: usize| 2 + n + c;
    let mut net = FlowNetwork::new(2 + n + family.len(), 0, 1);
    let positive = |y: f64| if y > 0.0 { y } else { 0.0 };
    for v in 0..n {
        let boost = if boosted == Some(v) { positive(duals.sigma) } else { 0.0 };
        net.add_arc(0, vertex_node(v), positive(duals.mu[v]) + boost);
    }
    for v in 0..n {
        for &c in family.containing(v) {
            net.add_arc(vertex_node(v), clique_node(c), f64::INFINITY);
        }
    }
    for c in 0..family.len() {
        net.add_arc(clique_node(c), 1, positive(duals.pi[c]));
    }
    // Negative cover duals only arise with equality rows; selecting such a
    // vertex is charged on its own sink arc.
    for v in 0..n {
        if duals.mu[v] < 0.0 {
            net.add_arc(vertex_node(v), 1, -duals.mu[v]);
        }
    }
    for v in bs.fixed_to_cut.iter() {
        net.add_arc(vertex_node(v), 1, f64::INFINITY);
    }
    for v in bs.fixed_to_keep.iter() {
        for &w in g.neighbors(v) {
            net.add_arc(vertex_node(w), vertex_node(v), f64::INFINITY);
        }
    }
    net
}

#[derive(Clone, Debug)]
pub struct PricingOptions {
    /// Most columns returned by one stage-2 round.
    pub max_columns: usize,
    /// Stop stage 2 at the first violated column (vertices in index order).
    pub early_exit: bool,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions {
            max_columns: 10,
            early_exit: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    One,
    Two,
}

#[derive(Clone, Debug, Default)]
pub struct PricingOutcome {
    /// Violated subsets with their violation, best first.
    pub columns: Vec<(VertexSet, f64)>,
    pub stage: Option<Stage>,
}

impl PricingOutcome {
    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn best_violation(&self) -> Option<f64> {
        self.columns.first().map(|c| c.1)
    }
}

fn source_subset(g: &Graph, cut: &crate::flow::CutResult) -> VertexSet {
    (0..g.n()).filter(|&v| cut.source_side[vertex_node(v)]).collect()
}

/// Two-stage pricing. Stage 1 solves one cut; its source side maximizes the
/// dual gain over all subsets including the empty one. Only when that
/// maximizer is empty and the cardinality dual is positive does stage 2
/// force each eligible vertex in turn by boosting its source arc.
pub fn price(
    g: &Graph,
    family: &CliqueFamily,
    duals: &DualPrices,
    bs: &BranchState,
    opts: &PricingOptions,
) -> PricingOutcome {
    let cut = max_flow_min_cut(&build_network(g, family, duals, bs, None));
    let s = source_subset(g, &cut);
    if !s.is_empty() {
        let viol = duals.violation(family, &s);
        if viol > VIOLATION_TOL {
            return PricingOutcome {
                columns: vec![(s, viol)],
                stage: Some(Stage::One),
            };
        }
        return PricingOutcome::default();
    }
    if duals.sigma <= VIOLATION_TOL {
        return PricingOutcome::default();
    }

    let eligible: Vec<usize> = (0..g.n()).filter(|&v| !bs.fixed_to_cut.contains(v)).collect();
    let boosted_cut = |v: usize| -> Option<(VertexSet, f64)> {
        let cut = max_flow_min_cut(&build_network(g, family, duals, bs, Some(v)));
        let s = source_subset(g, &cut);
        if s.is_empty() {
            return None;
        }
        let viol = duals.violation(family, &s);
        (viol > VIOLATION_TOL).then_some((s, viol))
    };

    let mut found: Vec<(VertexSet, f64)> = if opts.early_exit {
        eligible.iter().find_map(|&v| boosted_cut(v)).into_iter().collect()
    } else {
        eligible.par_iter().filter_map(|&v| boosted_cut(v)).collect()
    };
    found.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    found.dedup_by(|a, b| a.0 == b.0);
    found.truncate(opts.max_columns.max(1));
    let stage = (!found.is_empty()).then_some(Stage::Two);
    PricingOutcome { columns: found, stage }
}
