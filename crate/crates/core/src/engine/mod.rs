//! Branch-and-price over the cut variables.
//!
//! Nodes are processed best bound first (ties: deeper, then older). Each node
//! runs column generation to convergence, tries a rounding heuristic and
//! branches on a fractional cut variable, or on an unfixed vertex when the
//! cut variables are integral but do not yet describe a valid cut.

pub mod branching;
mod heuristics;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use log::{debug, info, warn};

use crate::error::{Error, Result};
use crate::graph::{automorphism_generators, Graph, VertexSet};
use crate::instance::{screen, Instance, ScreenResult};
use crate::lp::{Basis, LpResult, SimplexOptions};
use crate::master::{build_clique_family, separate_clique_cut, AddOutcome, MasterOptions, PoolColumn, Rmp};
use crate::pricing::{price, BranchState, PricingOptions};
use crate::symmetry::SymmetryState;

pub use branching::{select_branch_variable, BranchingOptions, PseudocostStore};
pub use heuristics::{idh_initial_solution, round_cut, Incumbent};

/// Artificial totals above this mark a node LP as infeasible.
const ARTIFICIAL_TOL: f64 = 1e-7;
const CLIQUE_SEPARATION_BUDGET: u64 = 1_000_000;
const MAX_SEPARATION_ROUNDS: usize = 100;

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub master: MasterOptions,
    pub pricing: PricingOptions,
    pub branching: BranchingOptions,
    /// Seed the incumbent with the iterative disconnection heuristic.
    pub heuristic: bool,
    pub symmetry: bool,
    /// At the root, branch on the lowest vertex of the largest orbit.
    pub orbit_branching: bool,
    /// Add violated clique rows after root column generation.
    pub separate_root: bool,
    pub time_limit: Option<Duration>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            master: MasterOptions::default(),
            pricing: PricingOptions::default(),
            branching: BranchingOptions::default(),
            heuristic: true,
            symmetry: true,
            orbit_branching: false,
            separate_root: false,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    /// The graph already has enough components; the empty cut is optimal.
    Trivial,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub cut: Option<VertexSet>,
    pub num_components: Option<usize>,
    /// Proven lower bound on the optimum.
    pub best_bound: Option<f64>,
    pub nodes: u64,
    pub max_depth: usize,
    pub cols_total: usize,
    pub cols_root: usize,
    pub root_lp_bound: Option<f64>,
    /// Root integrality gap when solved, remaining optimality gap otherwise.
    pub gap_percent: Option<f64>,
    pub heuristic_objective: Option<f64>,
    pub symmetry_generators: usize,
    pub symmetry_fixings: u64,
    pub symmetry_prunes: u64,
    pub pricing_seconds: f64,
    pub total_seconds: f64,
}

impl SolveReport {
    fn empty(inst: &Instance, status: SolveStatus) -> Self {
        SolveReport {
            instance: inst.name.clone(),
            n: inst.n(),
            m: inst.graph.m(),
            k: inst.k,
            status,
            objective: None,
            cut: None,
            num_components: None,
            best_bound: None,
            nodes: 0,
            max_depth: 0,
            cols_total: 0,
            cols_root: 0,
            root_lp_bound: None,
            gap_percent: None,
            heuristic_objective: None,
            symmetry_generators: 0,
            symmetry_fixings: 0,
            symmetry_prunes: 0,
            pricing_seconds: 0.0,
            total_seconds: 0.0,
        }
    }
}

/// Upper bounds a node imposes on pooled columns: a column is switched off
/// when it contains a vertex fixed into the cut, or when a vertex fixed to
/// survive is adjacent to it without belonging to it.
pub fn apply_fixing_to_pool(g: &Graph, pool: &[PoolColumn], bs: &BranchState) -> Vec<f64> {
    pool.iter()
        .map(|c| if bs.admits(g, &c.subset) { f64::INFINITY } else { 0.0 })
        .collect()
}

/// Whether a node with lower bound `bound` cannot beat `incumbent`.
pub fn prunable(bound: f64, incumbent: f64, integral_costs: bool) -> bool {
    if integral_costs {
        bound > incumbent - 1.0 + 1e-6
    } else {
        bound >= incumbent - 1e-6
    }
}

pub fn solve(inst: &Instance, opts: &EngineOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let mut report = match screen(inst) {
        ScreenResult::Trivial => {
            let mut r = SolveReport::empty(inst, SolveStatus::Trivial);
            r.objective = Some(0.0);
            r.cut = Some(VertexSet::new());
            r.num_components = Some(inst.components_after(&VertexSet::new()));
            r.best_bound = Some(0.0);
            r.gap_percent = Some(0.0);
            r
        }
        ScreenResult::Infeasible => SolveReport::empty(inst, SolveStatus::Infeasible),
        ScreenResult::Feasible(_) | ScreenResult::Undetermined => Search::new(inst, opts, start).run()?,
    };
    report.total_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Outcome of column generation at the root node without branching.
#[derive(Clone, Debug)]
pub struct RootRelaxation {
    /// LP value, `None` when the relaxation is infeasible.
    pub value: Option<f64>,
    pub columns: usize,
    pub cut_values: Vec<f64>,
}

/// Runs the root column generation exactly as the search does (same
/// master, pricing and penalty handling) and stops there.
pub fn root_relaxation(inst: &Instance, opts: &EngineOptions) -> Result<RootRelaxation> {
    let mut search = Search::new(inst, opts, Instant::now());
    let bs = BranchState::new();
    let mut lp = search.solve_node_lp(&bs)?;
    if opts.separate_root {
        if let NodeLp::Solved(res) = lp {
            lp = search.separate_root(&bs, res)?;
        }
    }
    let (value, cut_values) = match lp {
        NodeLp::Solved(res) => (Some(res.objective), search.rmp.x_values(&res)),
        NodeLp::Infeasible => (None, Vec::new()),
        NodeLp::TimeLimit => return Err(Error::InvalidInput("time limit reached at the root".into())),
    };
    Ok(RootRelaxation {
        value,
        columns: search.rmp.num_columns(),
        cut_values,
    })
}

#[derive(Clone, Copy, Debug)]
struct Origin {
    vertex: usize,
    up: bool,
    frac: f64,
    parent_bound: f64,
}

struct Node {
    id: u64,
    depth: usize,
    bs: BranchState,
    seq: Vec<usize>,
    bound: f64,
    basis: Option<Rc<Basis>>,
    origin: Option<Origin>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Greater means processed earlier.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

enum NodeLp {
    Solved(LpResult),
    Infeasible,
    TimeLimit,
}

enum Outcome {
    Done,
    Branched(Vec<Node>),
    TimeLimit(f64),
}

struct Search<'a> {
    inst: &'a Instance,
    opts: &'a EngineOptions,
    rmp: Rmp,
    symmetry: Option<SymmetryState>,
    pseudo: PseudocostStore,
    incumbent: Option<Incumbent>,
    integral_costs: bool,
    simplex: SimplexOptions,
    start: Instant,
    pricing_time: Duration,
    next_id: u64,
    report: SolveReport,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, opts: &'a EngineOptions, start: Instant) -> Self {
        let family = build_clique_family(&inst.graph, opts.master.family);
        debug!("clique family: {} cliques, mean size {:.2}", family.len(), family.mean_size());
        let rmp = Rmp::new(inst, family, &opts.master);
        let symmetry = opts.symmetry.then(|| {
            let gens = automorphism_generators(&inst.graph, &inst.costs);
            SymmetryState::new(&inst.graph, &inst.costs, gens)
        });
        let mut report = SolveReport::empty(inst, SolveStatus::Optimal);
        report.symmetry_generators = symmetry.as_ref().map_or(0, |s| s.generators().len());
        Search {
            inst,
            opts,
            rmp,
            symmetry,
            pseudo: PseudocostStore::new(inst.n()),
            incumbent: None,
            integral_costs: inst.has_integral_costs(),
            simplex: SimplexOptions::default(),
            start,
            pricing_time: Duration::ZERO,
            next_id: 0,
            report,
        }
    }

    fn out_of_time(&self) -> bool {
        self.opts.time_limit.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn offer(&mut self, candidate: Incumbent) {
        if self
            .incumbent
            .as_ref()
            .map_or(true, |inc| candidate.objective < inc.objective - 1e-9)
        {
            debug!("new incumbent {} ({})", candidate.objective, candidate.cut);
            self.incumbent = Some(candidate);
        }
    }

    fn can_prune(&self, bound: f64) -> bool {
        self.incumbent
            .as_ref()
            .is_some_and(|inc| prunable(bound, inc.objective, self.integral_costs))
    }

    fn run(mut self) -> Result<SolveReport> {
        if self.opts.heuristic {
            if let Some(inc) = idh_initial_solution(self.inst) {
                self.report.heuristic_objective = Some(inc.objective);
                self.offer(inc);
            }
        }
        let mut open = BinaryHeap::new();
        open.push(self.make_node(0, BranchState::new(), Vec::new(), f64::NEG_INFINITY, None, None));
        let mut timed_out_bound: Option<f64> = None;

        while let Some(node) = open.pop() {
            if self.can_prune(node.bound) {
                continue;
            }
            if self.out_of_time() {
                timed_out_bound = Some(node.bound);
                open.push(node);
                break;
            }
            self.report.nodes += 1;
            self.report.max_depth = self.report.max_depth.max(node.depth);
            match self.process(node)? {
                Outcome::Done => {}
                Outcome::Branched(children) => open.extend(children),
                Outcome::TimeLimit(bound) => {
                    timed_out_bound = Some(bound);
                    break;
                }
            }
        }

        let r = &mut self.report;
        r.cols_total = self.rmp.num_columns();
        r.pricing_seconds = self.pricing_time.as_secs_f64();
        if let Some(inc) = &self.incumbent {
            r.objective = Some(inc.objective);
            r.cut = Some(inc.cut.clone());
            r.num_components = Some(inc.components);
        }
        match timed_out_bound {
            Some(current) => {
                r.status = SolveStatus::TimeLimit;
                let open_min = open.iter().map(|n| n.bound).fold(current, f64::min);
                let lb = r.root_lp_bound.map_or(open_min, |root| open_min.max(root)).max(0.0);
                r.best_bound = Some(match r.objective {
                    Some(ub) => lb.min(ub),
                    None => lb,
                });
                r.gap_percent = match (r.objective, r.best_bound) {
                    (Some(ub), Some(lb)) if ub > 0.0 => Some(100.0 * (ub - lb) / ub),
                    (Some(_), Some(_)) => Some(0.0),
                    _ => None,
                };
            }
            None => match r.objective {
                Some(z) => {
                    r.status = SolveStatus::Optimal;
                    r.best_bound = Some(z);
                    r.gap_percent = r.root_lp_bound.map(|root| {
                        if z > 0.0 {
                            100.0 * (z - root) / z
                        } else {
                            0.0
                        }
                    });
                }
                None => r.status = SolveStatus::Infeasible,
            },
        }
        info!(
            "{} k={}: {} objective {:?} nodes {} columns {}",
            r.instance,
            r.k,
            r.status.as_str(),
            r.objective,
            r.nodes,
            r.cols_total
        );
        Ok(self.report)
    }

    fn make_node(
        &mut self,
        depth: usize,
        bs: BranchState,
        seq: Vec<usize>,
        bound: f64,
        basis: Option<Rc<Basis>>,
        origin: Option<Origin>,
    ) -> Node {
        let id = self.next_id;
        self.next_id += 1;
        Node {
            id,
            depth,
            bs,
            seq,
            bound,
            basis,
            origin,
        }
    }

    /// Loads the node's fixings into the master LP.
    fn apply_state(&mut self, bs: &BranchState) {
        let g = &self.inst.graph;
        for v in 0..g.n() {
            match bs.fixing(v) {
                Some(true) => self.rmp.set_x_bounds(v, 1.0, 1.0),
                Some(false) => self.rmp.set_x_bounds(v, 0.0, 0.0),
                None => self.rmp.set_x_bounds(v, 0.0, f64::INFINITY),
            }
        }
        let bounds = apply_fixing_to_pool(g, self.rmp.columns(), bs);
        for (i, ub) in bounds.into_iter().enumerate() {
            self.rmp.set_column_active(i, ub > 0.0);
        }
    }

    fn process(&mut self, node: Node) -> Result<Outcome> {
        let mut bs = node.bs.clone();
        if let Some(sym) = &self.symmetry {
            match sym.propagate(&node.seq, |v| bs.fixing(v)) {
                None => {
                    self.report.symmetry_prunes += 1;
                    return Ok(Outcome::Done);
                }
                Some(fixings) => {
                    for (v, cut) in fixings {
                        bs.fix(v, cut);
                        self.report.symmetry_fixings += 1;
                    }
                }
            }
        }

        self.apply_state(&bs);
        self.rmp.set_basis(node.basis.as_deref().cloned());
        let mut res = match self.solve_node_lp(&bs)? {
            NodeLp::Solved(res) => res,
            NodeLp::Infeasible => return Ok(Outcome::Done),
            NodeLp::TimeLimit => return Ok(Outcome::TimeLimit(node.bound)),
        };
        if node.depth == 0 && self.opts.separate_root {
            res = match self.separate_root(&bs, res)? {
                NodeLp::Solved(res) => res,
                NodeLp::Infeasible => return Ok(Outcome::Done),
                NodeLp::TimeLimit => return Ok(Outcome::TimeLimit(node.bound)),
            };
        }

        let lp_value = res.objective;
        if let Some(o) = node.origin {
            self.pseudo.record(o.vertex, o.up, lp_value - o.parent_bound, o.frac);
        }
        let bound = lp_value.max(node.bound);
        if node.depth == 0 {
            self.report.root_lp_bound = Some(lp_value);
            self.report.cols_root = self.rmp.num_columns();
            info!("root LP bound {lp_value:.6} with {} columns", self.rmp.num_columns());
        }
        if self.can_prune(bound) {
            return Ok(Outcome::Done);
        }

        let x = self.rmp.x_values(&res);
        if let Some(inc) = round_cut(self.inst, &x, bs.fixed_to_cut()) {
            self.offer(inc);
            if self.can_prune(bound) {
                return Ok(Outcome::Done);
            }
        }

        let candidates: Vec<(usize, f64)> = (0..self.inst.n())
            .filter(|&v| bs.fixing(v).is_none() && branching::is_fractional(x[v]))
            .map(|v| (v, x[v]))
            .collect();

        let vertex = if candidates.is_empty() {
            let cut: VertexSet = (0..self.inst.n())
                .filter(|&v| x[v] >= 1.0 - branching::FRACTIONALITY_TOL || bs.fixing(v) == Some(true))
                .collect();
            if let Some(inc) = Incumbent::verified(self.inst, cut) {
                self.offer(inc);
                return Ok(Outcome::Done);
            }
            // Integral but not a valid cut: keep splitting on free vertices.
            match (0..self.inst.n()).find(|&v| bs.fixing(v).is_none()) {
                Some(v) => v,
                None => return Ok(Outcome::Done),
            }
        } else {
            self.choose_branching_vertex(&bs, &candidates, node.depth, &res)
        };

        let xv = x[vertex];
        let basis = self.rmp.basis().cloned().map(Rc::new);
        let mut children = Vec::with_capacity(2);
        for up in [false, true] {
            let mut child = bs.clone();
            child.fix(vertex, up);
            let mut seq = node.seq.clone();
            seq.push(vertex);
            let frac = if up { 1.0 - xv.min(1.0) } else { xv.min(1.0) };
            let origin = Origin {
                vertex,
                up,
                frac,
                parent_bound: lp_value,
            };
            children.push(self.make_node(node.depth + 1, child, seq, bound, basis.clone(), Some(origin)));
        }
        Ok(Outcome::Branched(children))
    }

    fn choose_branching_vertex(
        &mut self,
        bs: &BranchState,
        candidates: &[(usize, f64)],
        depth: usize,
        res: &LpResult,
    ) -> usize {
        if depth == 0 && self.opts.orbit_branching {
            if let Some(sym) = self.symmetry.as_ref().filter(|s| !s.is_trivial()) {
                let best = candidates
                    .iter()
                    .map(|&(v, _)| (sym.orbit_of(v).len(), v))
                    .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
                if let Some((_, v)) = best {
                    return v;
                }
            }
        }
        let g = &self.inst.graph;
        let base = res.objective;
        let cap = self.inst.total_cost();
        let basis = res.basis.clone();
        let probe_opts = SimplexOptions {
            max_iterations: self.opts.branching.probe_pivots,
            ..SimplexOptions::default()
        };
        let rmp = &mut self.rmp;
        select_branch_variable(candidates, &mut self.pseudo, &self.opts.branching, |v, up| {
            let mut child = bs.clone();
            child.fix(v, up);
            let switched: Vec<usize> = (0..rmp.num_columns())
                .filter(|&i| rmp.is_column_active(i) && !child.admits(g, &rmp.columns()[i].subset))
                .collect();
            for &i in &switched {
                rmp.set_column_active(i, false);
            }
            let fixed = if up { 1.0 } else { 0.0 };
            rmp.set_x_bounds(v, fixed, fixed);
            let out = rmp.probe(Some(&basis), &probe_opts);
            rmp.set_x_bounds(v, 0.0, f64::INFINITY);
            for &i in &switched {
                rmp.set_column_active(i, true);
            }
            out.is_optimal().then(|| (out.objective - base).clamp(0.0, cap))
        })
        .expect("nonempty candidate list")
    }

    /// Column generation on the real objective, then a feasibility check
    /// when artificials remain positive. If the check finds the node
    /// feasible, the penalty was too small and is raised.
    fn solve_node_lp(&mut self, bs: &BranchState) -> Result<NodeLp> {
        loop {
            let Some(res) = self.column_generation(bs)? else {
                return Ok(NodeLp::TimeLimit);
            };
            if self.rmp.artificial_total(&res) <= ARTIFICIAL_TOL {
                return Ok(NodeLp::Solved(res));
            }
            self.rmp.set_phase_one(true);
            let check = self.column_generation(bs);
            self.rmp.set_phase_one(false);
            let Some(feas) = check? else {
                return Ok(NodeLp::TimeLimit);
            };
            if feas.objective > ARTIFICIAL_TOL {
                return Ok(NodeLp::Infeasible);
            }
            let big_m = self.rmp.big_m() * 10.0;
            warn!("penalty too small for artificial columns; raising it to {big_m}");
            self.rmp.set_big_m(big_m);
        }
    }

    fn column_generation(&mut self, bs: &BranchState) -> Result<Option<LpResult>> {
        loop {
            if self.out_of_time() {
                return Ok(None);
            }
            let mut res = self.rmp.solve(&self.simplex);
            if !res.is_optimal() {
                warn!("master LP ended with {:?}; retrying from a slack basis", res.status);
                self.rmp.set_basis(None);
                res = self.rmp.solve(&self.simplex);
                if !res.is_optimal() {
                    return Err(Error::LpNotOptimal(res.status));
                }
            }
            let duals = self.rmp.extract_duals(&res)?;
            let t = Instant::now();
            let out = price(&self.inst.graph, self.rmp.family(), &duals, bs, &self.opts.pricing);
            self.pricing_time += t.elapsed();
            if out.is_empty() {
                return Ok(Some(res));
            }
            let mut added = 0;
            for (s, _) in out.columns {
                debug_assert!(bs.admits(&self.inst.graph, &s));
                if let AddOutcome::Added(_) = self.rmp.add_column(s) {
                    added += 1;
                }
            }
            if added == 0 {
                warn!("pricing only returned pooled columns; treating as converged");
                return Ok(Some(res));
            }
        }
    }

    fn separate_root(&mut self, bs: &BranchState, mut res: LpResult) -> Result<NodeLp> {
        for _ in 0..MAX_SEPARATION_ROUNDS {
            let lambda = self.rmp.lambda_values(&res);
            let weighted: Vec<(VertexSet, f64)> = self
                .rmp
                .columns()
                .iter()
                .zip(&lambda)
                .map(|(c, &w)| (c.subset.clone(), w.max(0.0)))
                .collect();
            let Some((clique, score)) = separate_clique_cut(&self.inst.graph, &weighted, CLIQUE_SEPARATION_BUDGET)
            else {
                break;
            };
            debug!("adding clique row {clique} (score {score:.4})");
            self.rmp.add_clique_row(clique);
            res = match self.solve_node_lp(bs)? {
                NodeLp::Solved(r) => r,
                other => return Ok(other),
            };
        }
        Ok(NodeLp::Solved(res))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn pool_fixing_rules() {
        let inst = Instance::unit("p3", path(3), 2).unwrap();
        let fam = build_clique_family(&inst.graph, crate::master::FamilyMode::Cover);
        let rmp = Rmp::new(&inst, fam, &MasterOptions::default());
        let root = apply_fixing_to_pool(&inst.graph, rmp.columns(), &BranchState::new());
        assert!(root.iter().all(|b| b.is_infinite()));
        let mut cut_b = BranchState::new();
        cut_b.fix(1, true);
        assert_eq!(
            apply_fixing_to_pool(&inst.graph, rmp.columns(), &cut_b),
            vec![f64::INFINITY, 0.0, f64::INFINITY]
        );
        let mut keep_b = BranchState::new();
        keep_b.fix(1, false);
        assert_eq!(
            apply_fixing_to_pool(&inst.graph, rmp.columns(), &keep_b),
            vec![0.0, f64::INFINITY, 0.0]
        );
    }

    #[test]
    fn prune_rule_uses_integrality() {
        assert!(prunable(4.2, 5.0, true));
        assert!(!prunable(3.9, 5.0, true));
        assert!(!prunable(4.2, 5.0, false));
        assert!(prunable(5.0, 5.0, false));
    }

    #[test]
    fn small_instances() {
        let opts = EngineOptions::default();
        let r = solve(&Instance::unit("p3", path(3), 2).unwrap(), &opts).unwrap();
        assert_eq!((r.status, r.objective), (SolveStatus::Optimal, Some(1.0)));
        let r = solve(&Instance::unit("c6", cycle(6), 3).unwrap(), &opts).unwrap();
        assert_eq!(r.objective, Some(3.0));
        let r = solve(&Instance::unit("k5", complete(5), 2).unwrap(), &opts).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        let r = solve(&Instance::unit("e", Graph::empty(4), 3).unwrap(), &opts).unwrap();
        assert_eq!((r.status, r.objective), (SolveStatus::Trivial, Some(0.0)));
    }
}
