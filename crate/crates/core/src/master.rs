//! Clique families and the restricted master LP.
//!
//! Master rows: the cardinality row (sum of subset weights at least `k`), one
//! cover row per vertex (its subset weight plus its cut variable at least 1),
//! one packing row per family clique (total weight of subsets meeting the
//! clique at most 1) and an optional cost row on the cut variables.

use std::collections::HashMap;
use std::str::FromStr;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::flow::{weighted_vertex_connectivity, Connectivity};
use crate::graph::{Graph, VertexSet};
use crate::instance::Instance;
use crate::lp::{self, Basis, LpModel, LpResult, Relation, SimplexOptions};

/// Duals below this magnitude are treated as zero.
pub const DUAL_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyMode {
    /// Greedy maximal cliques covering every edge at least once.
    Cover,
    /// Greedy cliques covering every edge exactly once.
    Partition,
    /// One clique per edge.
    Edges,
}

impl FromStr for FamilyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cover" => Ok(FamilyMode::Cover),
            "partition" => Ok(FamilyMode::Partition),
            "edges" => Ok(FamilyMode::Edges),
            _ => Err(Error::InvalidInput(format!("unknown clique family `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CliqueFamily {
    pub mode: FamilyMode,
    cliques: Vec<VertexSet>,
    /// Indices of the cliques containing each vertex.
    membership: Vec<Vec<usize>>,
}

impl CliqueFamily {
    pub fn cliques(&self) -> &[VertexSet] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn containing(&self, v: usize) -> &[usize] {
        &self.membership[v]
    }

    /// Sorted indices of the cliques meeting `s`.
    pub fn touched_by(&self, s: &VertexSet) -> Vec<usize> {
        let mut touched: Vec<usize> = s.iter().flat_map(|v| self.membership[v].iter().copied()).collect();
        touched.sort_unstable();
        touched.dedup();
        touched
    }

    pub fn push(&mut self, clique: VertexSet) -> usize {
        let idx = self.cliques.len();
        for v in clique.iter() {
            self.membership[v].push(idx);
        }
        self.cliques.push(clique);
        idx
    }

    pub fn mean_size(&self) -> f64 {
        if self.cliques.is_empty() {
            return 0.0;
        }
        self.cliques.iter().map(|c| c.len()).sum::<usize>() as f64 / self.cliques.len() as f64
    }
}

/// Builds the clique family. Edges are scanned in input order; each
/// uncovered edge seeds a clique that is grown by scanning the remaining
/// vertices in index order. Isolated vertices get singleton cliques so that
/// every subset weight is bounded by some packing row.
pub fn build_clique_family(g: &Graph, mode: FamilyMode) -> CliqueFamily {
    let mut family = edge_cliques(g, mode);
    for v in 0..g.n() {
        if g.degree(v) == 0 {
            family.push(VertexSet::singleton(v));
        }
    }
    family
}

fn edge_cliques(g: &Graph, mode: FamilyMode) -> CliqueFamily {
    let n = g.n();
    let mut family = CliqueFamily {
        mode,
        cliques: Vec::new(),
        membership: vec![Vec::new(); n],
    };
    if mode == FamilyMode::Edges {
        for &(u, v) in g.edges() {
            family.push(VertexSet::from_unsorted(vec![u, v]));
        }
        return family;
    }
    let mut covered = vec![false; n * n];
    for &(u, v) in g.edges() {
        if covered[u * n + v] {
            continue;
        }
        let mut clique = vec![u, v];
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let joins = clique
                .iter()
                .all(|&c| g.has_edge(w, c) && (mode == FamilyMode::Cover || !covered[w * n + c]));
            if joins {
                clique.push(w);
            }
        }
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                covered[a * n + b] = true;
                covered[b * n + a] = true;
            }
        }
        family.push(VertexSet::from_unsorted(clique));
    }
    family
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectivityCut {
    /// Add the row only when `k <= 15`.
    Auto,
    On,
    Off,
}

impl FromStr for ConnectivityCut {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ConnectivityCut::Auto),
            "on" => Ok(ConnectivityCut::On),
            "off" => Ok(ConnectivityCut::Off),
            _ => Err(Error::InvalidInput(format!("connectivity cut must be auto|on|off, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MasterOptions {
    pub family: FamilyMode,
    /// Turn the cardinality and cover rows into equalities.
    pub equality_rows: bool,
    pub connectivity_cut: ConnectivityCut,
}

impl Default for MasterOptions {
    fn default() -> Self {
        MasterOptions {
            family: FamilyMode::Cover,
            equality_rows: false,
            connectivity_cut: ConnectivityCut::Auto,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PoolColumn {
    pub subset: VertexSet,
    pub touched: Vec<usize>,
    var: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOutcome {
    Added(usize),
    Duplicate(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualPrices {
    /// Cardinality row.
    pub sigma: f64,
    /// Cover rows, one per vertex.
    pub mu: Vec<f64>,
    /// Clique rows, stored with flipped sign so they are nonnegative.
    pub pi: Vec<f64>,
}

impl DualPrices {
    pub fn zero(n: usize, cliques: usize) -> Self {
        DualPrices {
            sigma: 0.0,
            mu: vec![0.0; n],
            pi: vec![0.0; cliques],
        }
    }

    /// How much a subset column violates its dual constraint.
    pub fn violation(&self, family: &CliqueFamily, s: &VertexSet) -> f64 {
        let gain: f64 = s.iter().map(|v| self.mu[v]).sum();
        let loss: f64 = family.touched_by(s).iter().map(|&c| self.pi[c]).sum();
        self.sigma + gain - loss
    }
}

pub struct Rmp {
    lp: LpModel,
    family: CliqueFamily,
    costs: Vec<f64>,
    card_row: usize,
    cover_rows: Vec<usize>,
    clique_rows: Vec<usize>,
    connectivity_row: Option<usize>,
    connectivity_rhs: Option<f64>,
    x_vars: Vec<usize>,
    artificials: Vec<usize>,
    big_m: f64,
    phase_one: bool,
    columns: Vec<PoolColumn>,
    index: HashMap<VertexSet, usize>,
    basis: Option<Basis>,
}

impl Rmp {
    /// Sets up the master with singleton columns, cut variables and
    /// artificial columns. The cost row is added when enabled and the graph
    /// has a breakable component.
    pub fn new(inst: &Instance, family: CliqueFamily, opts: &MasterOptions) -> Self {
        let n = inst.n();
        let mut lp = LpModel::new();
        let (card_rel, cover_rel) = if opts.equality_rows {
            (Relation::Eq, Relation::Eq)
        } else {
            (Relation::Ge, Relation::Ge)
        };
        let card_row = lp.add_row(&[], card_rel, inst.k as f64);
        let cover_rows: Vec<usize> = (0..n).map(|_| lp.add_row(&[], cover_rel, 1.0)).collect();
        let clique_rows: Vec<usize> = (0..family.len()).map(|_| lp.add_row(&[], Relation::Le, 1.0)).collect();

        let x_vars: Vec<usize> = (0..n)
            .map(|v| lp.add_column(inst.costs[v], 0.0, f64::INFINITY, &[(cover_rows[v], 1.0)]))
            .collect();

        let connectivity_rhs = match opts.connectivity_cut {
            ConnectivityCut::Off => None,
            ConnectivityCut::Auto if inst.k > 15 => None,
            _ => match weighted_vertex_connectivity(&inst.graph, &inst.costs) {
                Connectivity::Cut { cost, .. } if cost > 0.0 => Some(cost),
                _ => None,
            },
        };
        let connectivity_row = connectivity_rhs.map(|rhs| {
            let entries: Vec<(usize, f64)> = (0..n).map(|v| (x_vars[v], inst.costs[v])).collect();
            lp.add_row(&entries, Relation::Ge, rhs)
        });

        let big_m = 10.0 * inst.total_cost() + 1.0;
        let mut artificials = vec![lp.add_column(big_m, 0.0, f64::INFINITY, &[(card_row, 1.0)])];
        for &r in &cover_rows {
            artificials.push(lp.add_column(big_m, 0.0, f64::INFINITY, &[(r, 1.0)]));
        }

        let mut rmp = Rmp {
            lp,
            family,
            costs: inst.costs.clone(),
            card_row,
            cover_rows,
            clique_rows,
            connectivity_row,
            connectivity_rhs,
            x_vars,
            artificials,
            big_m,
            phase_one: false,
            columns: Vec::new(),
            index: HashMap::new(),
            basis: None,
        };
        for v in 0..n {
            rmp.add_column(VertexSet::singleton(v));
        }
        rmp
    }

    pub fn family(&self) -> &CliqueFamily {
        &self.family
    }

    pub fn lp(&self) -> &LpModel {
        &self.lp
    }

    pub fn columns(&self) -> &[PoolColumn] {
        &self.columns
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn connectivity_rhs(&self) -> Option<f64> {
        self.connectivity_rhs
    }

    pub fn has_connectivity_row(&self) -> bool {
        self.connectivity_row.is_some()
    }

    pub fn num_structural_rows(&self) -> usize {
        1 + self.cover_rows.len() + self.clique_rows.len()
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn find(&self, subset: &VertexSet) -> Option<usize> {
        self.index.get(subset).copied()
    }

    /// Adds a subset column unless an identical subset is already pooled.
    pub fn add_column(&mut self, subset: VertexSet) -> AddOutcome {
        assert!(!subset.is_empty(), "empty subset column");
        if let Some(&idx) = self.index.get(&subset) {
            return AddOutcome::Duplicate(idx);
        }
        let touched = self.family.touched_by(&subset);
        let mut entries = vec![(self.card_row, 1.0)];
        entries.extend(subset.iter().map(|v| (self.cover_rows[v], 1.0)));
        entries.extend(touched.iter().map(|&c| (self.clique_rows[c], 1.0)));
        let var = self.lp.add_column(0.0, 0.0, f64::INFINITY, &entries);
        let idx = self.columns.len();
        self.index.insert(subset.clone(), idx);
        self.columns.push(PoolColumn { subset, touched, var });
        AddOutcome::Added(idx)
    }

    /// Appends a clique row (and the clique to the family used by pricing).
    pub fn add_clique_row(&mut self, clique: VertexSet) -> usize {
        let idx = self.family.push(clique.clone());
        let mut entries = Vec::new();
        for col in &mut self.columns {
            if col.subset.intersects(&clique) {
                col.touched.push(idx);
                entries.push((col.var, 1.0));
            }
        }
        let row = self.lp.add_row(&entries, Relation::Le, 1.0);
        self.clique_rows.push(row);
        idx
    }

    pub fn set_x_bounds(&mut self, v: usize, lower: f64, upper: f64) {
        self.lp.set_bounds(self.x_vars[v], lower, upper);
    }

    pub fn set_column_active(&mut self, idx: usize, active: bool) {
        let var = self.columns[idx].var;
        self.lp.set_bounds(var, 0.0, if active { f64::INFINITY } else { 0.0 });
    }

    pub fn is_column_active(&self, idx: usize) -> bool {
        self.lp.bounds(self.columns[idx].var).1 > 0.0
    }

    /// Switches between the real objective and minimizing the artificial
    /// total only (a feasibility check of the node).
    pub fn set_phase_one(&mut self, on: bool) {
        if on == self.phase_one {
            return;
        }
        self.phase_one = on;
        for v in 0..self.x_vars.len() {
            let c = if on { 0.0 } else { self.costs[v] };
            self.lp.set_cost(self.x_vars[v], c);
        }
        for &a in &self.artificials {
            self.lp.set_cost(a, if on { 1.0 } else { self.big_m });
        }
    }

    pub fn set_big_m(&mut self, big_m: f64) {
        self.big_m = big_m;
        if !self.phase_one {
            for &a in &self.artificials {
                self.lp.set_cost(a, big_m);
            }
        }
    }

    pub fn basis(&self) -> Option<&Basis> {
        self.basis.as_ref()
    }

    pub fn set_basis(&mut self, basis: Option<Basis>) {
        self.basis = basis;
    }

    /// Solves the current LP from the stored basis and stores the new one.
    pub fn solve(&mut self, opts: &SimplexOptions) -> LpResult {
        let res = lp::solve_with(&self.lp, self.basis.as_ref(), opts);
        self.basis = Some(res.basis.clone());
        res
    }

    /// Solves without touching the stored basis.
    pub fn probe(&self, basis: Option<&Basis>, opts: &SimplexOptions) -> LpResult {
        lp::solve_with(&self.lp, basis, opts)
    }

    pub fn x_values(&self, res: &LpResult) -> Vec<f64> {
        self.x_vars.iter().map(|&j| res.primal[j]).collect()
    }

    pub fn lambda_values(&self, res: &LpResult) -> Vec<f64> {
        self.columns.iter().map(|c| res.primal[c.var]).collect()
    }

    pub fn artificial_total(&self, res: &LpResult) -> f64 {
        self.artificials.iter().map(|&a| res.primal[a]).sum()
    }

    /// Objective of the LP without the artificial penalty.
    pub fn cut_cost_part(&self, res: &LpResult) -> f64 {
        self.x_vars.iter().zip(&self.costs).map(|(&j, c)| c * res.primal[j]).sum()
    }

    /// Reads the pricing duals off an optimal LP. Inequality-row duals are
    /// clamped at zero; cover and cardinality duals of equality rows keep
    /// their sign.
    pub fn extract_duals(&self, res: &LpResult) -> Result<DualPrices> {
        if !res.is_optimal() {
            return Err(Error::LpNotOptimal(res.status));
        }
        let clean = |y: f64, clamp: bool| {
            if y.abs() < DUAL_EPS || (clamp && y < 0.0) {
                0.0
            } else {
                y
            }
        };
        let clamp_ge = self.lp.relation(self.card_row) == Relation::Ge;
        let sigma = clean(res.duals[self.card_row], clamp_ge);
        let mu = self
            .cover_rows
            .iter()
            .map(|&r| clean(res.duals[r], self.lp.relation(r) == Relation::Ge))
            .collect();
        let pi = self.clique_rows.iter().map(|&r| clean(-res.duals[r], true)).collect();
        Ok(DualPrices { sigma, mu, pi })
    }

    /// Rebuilds every column's clique list from scratch and compares.
    pub fn pool_is_consistent(&self) -> bool {
        self.columns.iter().all(|c| {
            let mut t = c.touched.clone();
            t.sort_unstable();
            let expected = self.family.touched_by(&c.subset);
            let rows: Vec<usize> = self
                .lp
                .column_entries(c.var)
                .iter()
                .filter_map(|&(r, _)| self.clique_rows.iter().position(|&q| q == r))
                .collect();
            t == expected && rows == expected
        })
    }
}

/// Finds the clique maximizing the total weight of pooled subsets meeting
/// it, among maximal cliques, and returns it if that weight exceeds 1.
/// With nonnegative weights the score only grows when a clique is extended,
/// so some maximal clique attains the optimum.
pub fn separate_clique_cut(
    g: &Graph,
    columns: &[(VertexSet, f64)],
    budget: u64,
) -> Option<(VertexSet, f64)> {
    let n = g.n();
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (s, w)) in columns.iter().enumerate() {
        if *w > 0.0 {
            for v in s.iter() {
                by_vertex[v].push(i);
            }
        }
    }
    let mut mark = vec![usize::MAX; columns.len()];
    let mut stamp = 0usize;
    let mut best: Option<(VertexSet, f64)> = None;
    let complete = crate::graph::for_each_maximal_clique(g, budget, |clique| {
        stamp += 1;
        let mut score = 0.0;
        for &v in clique {
            for &i in &by_vertex[v] {
                if mark[i] != stamp {
                    mark[i] = stamp;
                    score += columns[i].1;
                }
            }
        }
        if best.as_ref().map_or(true, |(_, b)| score > *b + 1e-12) {
            best = Some((VertexSet::from_unsorted(clique.to_vec()), score));
        }
    });
    if !complete {
        warn!("clique separation stopped after {budget} enumeration nodes");
        return None;
    }
    let found = best.filter(|(_, score)| *score > 1.0 + 1e-6);
    if let Some((c, score)) = &found {
        debug!("violated clique {c} with score {score:.4}");
    }
    found
}
