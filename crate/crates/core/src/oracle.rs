//! Brute-force reference solver. Shares nothing with the engine beyond the
//! graph type: every candidate cut is checked with one component count.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::instance::Instance;

/// Largest graph the full enumeration accepts.
pub const FULL_MAX_VERTICES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// All `2^n` subsets.
    Full,
    /// Subsets in nondecreasing cost, at most this many.
    CostBounded(u64),
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(Regime::Full);
        }
        s.strip_prefix("cost:")
            .and_then(|l| l.parse().ok())
            .map(Regime::CostBounded)
            .ok_or_else(|| Error::InvalidInput(format!("unknown regime '{s}' (expected full or cost:<limit>)")))
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Full => write!(f, "full"),
            Regime::CostBounded(l) => write!(f, "cost:{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub cut: VertexSet,
    pub explored: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    Optimal(OracleResult),
    Infeasible { explored: u64 },
    /// The limit was hit; every cut cheaper than `lower_bound` is infeasible.
    BudgetExceeded { lower_bound: f64, explored: u64 },
}

impl OracleOutcome {
    pub fn objective(&self) -> Option<f64> {
        match self {
            OracleOutcome::Optimal(r) => Some(r.objective),
            _ => None,
        }
    }
}

pub fn brute_force(inst: &Instance, regime: Regime) -> Result<OracleOutcome> {
    match regime {
        Regime::Full => full(inst),
        Regime::CostBounded(limit) => cost_ordered(inst, limit),
    }
}

fn mask_to_removed(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|v| mask >> v & 1 == 1).collect()
}

/// Cheapest feasible cut; equal costs go to the lexicographically smallest
/// sorted vertex list, so the answer does not depend on thread scheduling.
fn full(inst: &Instance) -> Result<OracleOutcome> {
    let n = inst.n();
    if n > FULL_MAX_VERTICES {
        return Err(Error::InvalidInput(format!(
            "full enumeration supports at most {FULL_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let total = 1u64 << n;
    let better = |a: &(f64, VertexSet), b: &(f64, VertexSet)| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1 < b.1,
        o => o == Ordering::Less,
    };
    let best = (0..total)
        .into_par_iter()
        .filter_map(|mask| {
            let removed = mask_to_removed(mask, n);
            (inst.graph.count_components_masked(&removed) >= inst.k).then(|| {
                let cut = VertexSet::from_mask(&removed);
                (inst.cut_cost(&cut), cut)
            })
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a });
    Ok(match best {
        Some((objective, cut)) => OracleOutcome::Optimal(OracleResult {
            objective,
            cut,
            explored: total,
        }),
        None => OracleOutcome::Infeasible { explored: total },
    })
}

#[derive(PartialEq)]
struct Candidate {
    cost: f64,
    /// Positions in the cost-sorted vertex order, increasing.
    members: Vec<usize>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost.total_cmp(&other.cost).then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Enumerates subsets by nondecreasing cost. With vertices sorted by cost,
/// each subset whose last position is `i` spawns two successors: append
/// `i + 1`, or replace `i` by `i + 1`. Both are at least as expensive and
/// every nonempty subset is reached exactly once.
fn cost_ordered(inst: &Instance, limit: u64) -> Result<OracleOutcome> {
    let n = inst.n();
    if inst.costs.iter().any(|&c| c < 0.0) {
        return Err(Error::InvalidInput("cost-ordered enumeration needs nonnegative costs".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.costs[a].total_cmp(&inst.costs[b]).then(a.cmp(&b)));
    let cost_of = |pos: &[usize]| pos.iter().map(|&p| inst.costs[order[p]]).sum::<f64>();

    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Candidate {
        cost: 0.0,
        members: Vec::new(),
    }));
    let mut explored = 0u64;
    while let Some(Reverse(cand)) = heap.pop() {
        if explored >= limit {
            return Ok(OracleOutcome::BudgetExceeded {
                lower_bound: cand.cost,
                explored,
            });
        }
        explored += 1;
        let cut = VertexSet::from_unsorted(cand.members.iter().map(|&p| order[p]).collect());
        if inst.components_after(&cut) >= inst.k {
            return Ok(OracleOutcome::Optimal(OracleResult {
                objective: inst.cut_cost(&cut),
                cut,
                explored,
            }));
        }
        let next = cand.members.last().map_or(0, |&i| i + 1);
        if next < n {
            let mut grown = cand.members.clone();
            grown.push(next);
            heap.push(Reverse(Candidate {
                cost: cost_of(&grown),
                members: grown,
            }));
            if !cand.members.is_empty() {
                let mut shifted = cand.members;
                *shifted.last_mut().unwrap() = next;
                heap.push(Reverse(Candidate {
                    cost: cost_of(&shifted),
                    members: shifted,
                }));
            }
        }
    }
    Ok(OracleOutcome::Infeasible { explored })
}
