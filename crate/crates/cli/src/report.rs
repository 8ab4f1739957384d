//! JSON documents written by the subcommands. Field order is fixed by the
//! struct layout; everything that depends on the clock lives under `timing`.

use kvcut_core::engine::SolveReport;
use kvcut_core::oracle::{OracleOutcome, Regime};
use serde::Serialize;

#[derive(Serialize)]
pub struct Timing {
    pub pricing_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Serialize)]
pub struct SymmetryCounts {
    pub generators: usize,
    pub fixings: u64,
    pub prunes: u64,
}

#[derive(Serialize)]
pub struct SolveJson {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub status: &'static str,
    pub objective: Option<f64>,
    /// One-based vertex ids.
    pub cut: Option<Vec<usize>>,
    pub num_components: Option<usize>,
    pub best_bound: Option<f64>,
    pub nodes: u64,
    pub max_depth: usize,
    pub cols_total: usize,
    pub cols_root: usize,
    pub root_lp_bound: Option<f64>,
    pub gap_percent: Option<f64>,
    pub heuristic_objective: Option<f64>,
    pub symmetry: SymmetryCounts,
    pub timing: Timing,
}

impl From<&SolveReport> for SolveJson {
    fn from(r: &SolveReport) -> Self {
        SolveJson {
            instance: r.instance.clone(),
            n: r.n,
            m: r.m,
            k: r.k,
            status: r.status.as_str(),
            objective: r.objective,
            cut: r.cut.as_ref().map(|c| c.to_one_based()),
            num_components: r.num_components,
            best_bound: r.best_bound,
            nodes: r.nodes,
            max_depth: r.max_depth,
            cols_total: r.cols_total,
            cols_root: r.cols_root,
            root_lp_bound: r.root_lp_bound,
            gap_percent: r.gap_percent,
            heuristic_objective: r.heuristic_objective,
            symmetry: SymmetryCounts {
                generators: r.symmetry_generators,
                fixings: r.symmetry_fixings,
                prunes: r.symmetry_prunes,
            },
            timing: Timing {
                pricing_seconds: r.pricing_seconds,
                total_seconds: r.total_seconds,
            },
        }
    }
}

#[derive(Serialize)]
pub struct OracleJson {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub regime: String,
    pub status: &'static str,
    pub objective: Option<f64>,
    pub cut: Option<Vec<usize>>,
    pub lower_bound: Option<f64>,
    pub explored: u64,
}

impl OracleJson {
    pub fn new(instance: &str, n: usize, k: usize, regime: Regime, out: &OracleOutcome) -> Self {
        let mut j = OracleJson {
            instance: instance.to_string(),
            n,
            k,
            regime: regime.to_string(),
            status: "",
            objective: None,
            cut: None,
            lower_bound: None,
            explored: 0,
        };
        match out {
            OracleOutcome::Optimal(r) => {
                j.status = "optimal";
                j.objective = Some(r.objective);
                j.cut = Some(r.cut.to_one_based());
                j.lower_bound = Some(r.objective);
                j.explored = r.explored;
            }
            OracleOutcome::Infeasible { explored } => {
                j.status = "infeasible";
                j.explored = *explored;
            }
            OracleOutcome::BudgetExceeded { lower_bound, explored } => {
                j.status = "budget_exceeded";
                j.lower_bound = Some(*lower_bound);
                j.explored = *explored;
            }
        }
        j
    }
}
