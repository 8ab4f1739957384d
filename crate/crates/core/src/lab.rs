//! Root LP bounds of three formulations, for comparing their strength.
//!
//! * extended: the branch-and-price master solved by column generation at
//!   the root, for any clique family, without the connectivity row;
//! * natural: cut variables in [0, 1] plus forest inequalities separated
//!   by a maximum-weight forest;
//! * compact: `k` assignment variables per vertex with pairwise separation
//!   rows, reported as total cost minus the retained weight.

use std::time::Instant;

use log::debug;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::engine::{root_relaxation, EngineOptions};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{self, LpModel, Relation};
use crate::master::{ConnectivityCut, FamilyMode, MasterOptions};

/// Forest inequalities violated by less than this are not added.
pub const CUT_VIOLATION_TOL: f64 = 1e-6;
const MAX_CUT_ROUNDS: usize = 10_000;

/// One formulation's root bound.
#[derive(Clone, Debug, Serialize)]
pub struct FormulationBound {
    /// `None` when the relaxation is infeasible.
    pub value: Option<f64>,
    pub seconds: f64,
    pub iterations: u64,
    pub cuts: usize,
    pub columns: usize,
}

impl FormulationBound {
    /// Integrality gap in percent against a known optimum.
    pub fn gap_percent(&self, optimum: f64) -> Option<f64> {
        let v = self.value?;
        Some(if optimum > 0.0 { 100.0 * (optimum - v) / optimum } else { 0.0 })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapEntry {
    pub formulation: String,
    pub gap_percent: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub optimum: Option<f64>,
    pub extended_cover: FormulationBound,
    pub extended_partition: FormulationBound,
    pub extended_edges: FormulationBound,
    pub natural: FormulationBound,
    pub compact: FormulationBound,
    pub gaps: Vec<GapEntry>,
}

/// Computes every bound; gaps are filled in when `optimum` is known.
pub fn bound_report(inst: &Instance, optimum: Option<f64>) -> Result<BoundReport> {
    let extended_cover = lp_bound_e2(inst, FamilyMode::Cover)?;
    let extended_partition = lp_bound_e2(inst, FamilyMode::Partition)?;
    let extended_edges = lp_bound_e2(inst, FamilyMode::Edges)?;
    let natural = lp_bound_natural(inst)?;
    let compact = lp_bound_compact(inst)?;
    let gaps = match optimum {
        Some(z) => [
            ("extended_cover", &extended_cover),
            ("extended_partition", &extended_partition),
            ("extended_edges", &extended_edges),
            ("natural", &natural),
            ("compact", &compact),
        ]
        .iter()
        .map(|(name, b)| GapEntry {
            formulation: name.to_string(),
            gap_percent: b.gap_percent(z),
        })
        .collect(),
        None => Vec::new(),
    };
    Ok(BoundReport {
        instance: inst.name.clone(),
        n: inst.n(),
        m: inst.graph.m(),
        k: inst.k,
        optimum,
        extended_cover,
        extended_partition,
        extended_edges,
        natural,
        compact,
        gaps,
    })
}

/// Root column generation of the master with the given clique family.
/// An instance that already has `k` components has bound zero.
pub fn lp_bound_e2(inst: &Instance, family: FamilyMode) -> Result<FormulationBound> {
    let start = Instant::now();
    if inst.components_after(&Default::default()) >= inst.k {
        return Ok(FormulationBound {
            value: Some(0.0),
            seconds: start.elapsed().as_secs_f64(),
            iterations: 0,
            cuts: 0,
            columns: 0,
        });
    }
    let opts = EngineOptions {
        master: MasterOptions {
            family,
            equality_rows: false,
            connectivity_cut: ConnectivityCut::Off,
        },
        heuristic: false,
        symmetry: false,
        ..EngineOptions::default()
    };
    let root = root_relaxation(inst, &opts)?;
    Ok(FormulationBound {
        value: root.value,
        seconds: start.elapsed().as_secs_f64(),
        iterations: 0,
        cuts: 0,
        columns: root.columns,
    })
}

/// Maximum-weight forest over edges with positive weight, by Kruskal.
pub fn max_weight_forest(n: usize, weighted_edges: &[(usize, usize, f64)]) -> Vec<(usize, usize)> {
    let mut order: Vec<&(usize, usize, f64)> = weighted_edges.iter().filter(|e| e.2 > 0.0).collect();
    order.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut uf = UnionFind::<usize>::new(n);
    order
        .into_iter()
        .filter(|&&(u, v, _)| uf.union(u, v))
        .map(|&(u, v, _)| (u, v))
        .collect()
}

/// Forest inequality for `forest` as (coefficient per vertex, rhs):
/// `sum_v (deg(v) - 1) x_v >= k - n + |forest|`.
pub fn forest_inequality(n: usize, k: usize, forest: &[(usize, usize)]) -> (Vec<f64>, f64) {
    let mut coef = vec![-1.0; n];
    for &(u, v) in forest {
        coef[u] += 1.0;
        coef[v] += 1.0;
    }
    (coef, k as f64 - n as f64 + forest.len() as f64)
}

/// Cut loop over forest inequalities with x in [0, 1].
pub fn lp_bound_natural(inst: &Instance) -> Result<FormulationBound> {
    let start = Instant::now();
    let n = inst.n();
    let mut model = LpModel::new();
    for v in 0..n {
        model.add_column(inst.costs[v], 0.0, 1.0, &[]);
    }
    let mut basis = None;
    let mut iterations = 0;
    let mut cuts = 0;
    for _ in 0..MAX_CUT_ROUNDS {
        let res = lp::solve(&model, basis.as_ref());
        iterations += res.iterations;
        match res.status {
            lp::LpStatus::Optimal => {}
            lp::LpStatus::Infeasible => {
                return Ok(FormulationBound {
                    value: None,
                    seconds: start.elapsed().as_secs_f64(),
                    iterations,
                    cuts,
                    columns: n,
                })
            }
            other => return Err(Error::LpNotOptimal(other)),
        }
        let x = &res.primal;
        let weighted: Vec<(usize, usize, f64)> = inst
            .graph
            .sorted_edges()
            .into_iter()
            .map(|(u, v)| (u, v, 1.0 - x[u] - x[v]))
            .collect();
        let forest = max_weight_forest(n, &weighted);
        let (coef, rhs) = forest_inequality(n, inst.k, &forest);
        let lhs: f64 = coef.iter().zip(x).map(|(a, b)| a * b).sum();
        if rhs - lhs <= CUT_VIOLATION_TOL {
            debug!("natural bound {} after {cuts} forest cuts", res.objective);
            return Ok(FormulationBound {
                value: Some(res.objective),
                seconds: start.elapsed().as_secs_f64(),
                iterations,
                cuts,
                columns: n,
            });
        }
        let entries: Vec<(usize, f64)> = coef.iter().enumerate().filter(|e| *e.1 != 0.0).map(|(v, &a)| (v, a)).collect();
        model.add_row(&entries, Relation::Ge, rhs);
        cuts += 1;
        basis = Some(res.basis);
    }
    Err(Error::InvalidInput("forest cut loop did not converge".into()))
}

/// LP relaxation of the assignment model, reported as a cut-cost bound.
pub fn lp_bound_compact(inst: &Instance) -> Result<FormulationBound> {
    let start = Instant::now();
    let n = inst.n();
    let k = inst.k;
    let var = |i: usize, v: usize| i * n + v;
    let mut model = LpModel::new();
    for _ in 0..k {
        for v in 0..n {
            // Minimizing the negated retained weight.
            model.add_column(-inst.costs[v], 0.0, 1.0, &[]);
        }
    }
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::new();
    for v in 0..n {
        rows.push(((0..k).map(|i| (var(i, v), 1.0)).collect(), Relation::Le, 1.0));
    }
    for i in 0..k {
        for &(a, b) in inst.graph.edges() {
            for (u, v) in [(a, b), (b, a)] {
                let mut e = vec![(var(i, u), 1.0)];
                e.extend((0..k).filter(|&j| j != i).map(|j| (var(j, v), 1.0)));
                rows.push((e, Relation::Le, 1.0));
            }
        }
    }
    for i in 0..k {
        rows.push(((0..n).map(|v| (var(i, v), 1.0)).collect(), Relation::Ge, 1.0));
    }
    for (e, rel, rhs) in &rows {
        model.add_row(e, *rel, *rhs);
    }
    // Every y at 1/k keeps all weight. When that point is feasible it meets
    // the trivial bound (each vertex is assigned at most once), so it is
    // optimal and the simplex run can be skipped.
    let uniform = vec![1.0 / k as f64; k * n];
    let activities = model.row_activities(&uniform);
    let uniform_feasible = rows.iter().zip(&activities).all(|((_, rel, rhs), &a)| match rel {
        Relation::Le => a <= rhs + 1e-9,
        Relation::Ge => a >= rhs - 1e-9,
        Relation::Eq => (a - rhs).abs() <= 1e-9,
    });
    if uniform_feasible {
        let kept = -model.objective_value(&uniform);
        if (kept - inst.total_cost()).abs() <= 1e-9 * (1.0 + inst.total_cost()) {
            return Ok(FormulationBound {
                value: Some(inst.total_cost() - kept),
                seconds: start.elapsed().as_secs_f64(),
                iterations: 0,
                cuts: 0,
                columns: k * n,
            });
        }
    }
    let res = lp::solve(&model, None);
    let value = match res.status {
        lp::LpStatus::Optimal => Some(inst.total_cost() + res.objective),
        lp::LpStatus::Infeasible => None,
        other => return Err(Error::LpNotOptimal(other)),
    };
    Ok(FormulationBound {
        value,
        seconds: start.elapsed().as_secs_f64(),
        iterations: res.iterations,
        cuts: 0,
        columns: k * n,
    })
}
