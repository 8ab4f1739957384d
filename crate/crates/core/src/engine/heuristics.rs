use log::debug;

use crate::flow::component_breaking_cut;
use crate::graph::VertexSet;
use crate::instance::Instance;

/// A feasible cut whose component count has been checked on the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Incumbent {
    pub cut: VertexSet,
    pub objective: f64,
    pub components: usize,
}

impl Incumbent {
    /// Returns `Some` only if removing `cut` leaves at least `k` components.
    pub fn verified(inst: &Instance, cut: VertexSet) -> Option<Self> {
        let components = inst.components_after(&cut);
        (components >= inst.k).then(|| Incumbent {
            objective: inst.cut_cost(&cut),
            cut,
            components,
        })
    }
}

/// Iterative disconnection: while fewer than `k` components remain, remove
/// the cheapest disconnecting set of the non-clique component that is
/// cheapest to break (ties to the component with the lowest vertex). Fails
/// once every component is a clique.
pub fn idh_initial_solution(inst: &Instance) -> Option<Incumbent> {
    let g = &inst.graph;
    let n = g.n();
    let mut removed = vec![false; n];
    loop {
        let comps = g.components_masked(&removed);
        if comps.len() >= inst.k {
            let cut = VertexSet::from_mask(&removed);
            debug!("disconnection heuristic found cost {}", inst.cut_cost(&cut));
            return Incumbent::verified(inst, cut);
        }
        let mut best: Option<(f64, VertexSet)> = None;
        for comp in &comps {
            if let Some((cost, set)) = component_breaking_cut(g, &inst.costs, &removed, comp) {
                if best.as_ref().map_or(true, |(c, _)| cost < c - 1e-9) {
                    best = Some((cost, set));
                }
            }
        }
        let (_, set) = best?;
        for v in set.iter() {
            removed[v] = true;
        }
    }
}

/// Turns LP cut values into a feasible cut: take every vertex with positive
/// value plus the forced ones, then drop vertices (most expensive first)
/// while the cut stays feasible.
pub fn round_cut(inst: &Instance, x: &[f64], forced: &VertexSet) -> Option<Incumbent> {
    let n = inst.n();
    let mut mask: Vec<bool> = (0..n).map(|v| x[v] > 1e-6 || forced.contains(v)).collect();
    if inst.graph.count_components_masked(&mask) < inst.k {
        return None;
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| mask[v] && !forced.contains(v)).collect();
    order.sort_by(|&a, &b| {
        inst.costs[b]
            .total_cmp(&inst.costs[a])
            .then(x[a].total_cmp(&x[b]))
            .then(a.cmp(&b))
    });
    for v in order {
        mask[v] = false;
        if inst.graph.count_components_masked(&mask) < inst.k {
            mask[v] = true;
        }
    }
    Incumbent::verified(inst, VertexSet::from_mask(&mask))
}
