use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::graph::{has_stable_set_of_size, Graph, StableSetAnswer, VertexSet, DEFAULT_STABLE_SET_BUDGET};

/// A graph with vertex costs and the number of components the cut must leave.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub costs: Vec<f64>,
    pub k: usize,
}

impl Instance {
    pub fn new(name: impl Into<String>, graph: Graph, costs: Vec<f64>, k: usize) -> Result<Self> {
        if costs.len() != graph.n() {
            return Err(Error::InvalidInput(format!(
                "{} costs for {} vertices",
                costs.len(),
                graph.n()
            )));
        }
        if let Some(v) = costs.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInput(format!("vertex {} has invalid cost {}", v + 1, costs[v])));
        }
        if k < 2 {
            return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
        }
        let zero = costs.iter().filter(|&&c| c == 0.0).count();
        if zero > 0 {
            warn!("{zero} vertices have zero cost; optimal cuts may not be unique");
        }
        Ok(Instance {
            name: name.into(),
            graph,
            costs,
            k,
        })
    }

    pub fn unit(name: impl Into<String>, graph: Graph, k: usize) -> Result<Self> {
        let n = graph.n();
        Self::new(name, graph, vec![1.0; n], k)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    pub fn has_integral_costs(&self) -> bool {
        self.costs.iter().all(|c| c.fract() == 0.0)
    }

    pub fn cut_cost(&self, cut: &VertexSet) -> f64 {
        cut.iter().map(|v| self.costs[v]).sum()
    }

    pub fn components_after(&self, cut: &VertexSet) -> usize {
        self.graph.count_components_masked(&cut.to_mask(self.n()))
    }

    pub fn is_feasible_cut(&self, cut: &VertexSet) -> bool {
        self.components_after(cut) >= self.k
    }
}

/// Reproducible costs in `{1, ..., 10}`: splitmix64 seeded with `seed`,
/// one draw per vertex in index order, cost `1 + draw % 10`.
pub fn make_weighted(g: &Graph, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::from_seed(seed.to_le_bytes());
    (0..g.n()).map(|_| (1 + rng.next_u64() % 10) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScreenResult {
    /// The graph already has at least `k` components; the empty cut is optimal.
    Trivial,
    /// A stable set of size `k` exists, so some cut is feasible.
    Feasible(VertexSet),
    /// No stable set of size `k` exists.
    Infeasible,
    /// The stable-set search ran out of budget.
    Undetermined,
}

pub fn screen(inst: &Instance) -> ScreenResult {
    screen_with_budget(inst, DEFAULT_STABLE_SET_BUDGET)
}

/// A k-vertex cut exists iff the graph has a stable set of size k: keep one
/// vertex per surviving component, or cut everything outside the stable set.
pub fn screen_with_budget(inst: &Instance, budget: u64) -> ScreenResult {
    let none = VertexSet::new();
    if inst.components_after(&none) >= inst.k {
        return ScreenResult::Trivial;
    }
    match has_stable_set_of_size(&inst.graph, inst.k, budget) {
        StableSetAnswer::Yes(s) => ScreenResult::Feasible(s),
        StableSetAnswer::No => ScreenResult::Infeasible,
        StableSetAnswer::Unknown => ScreenResult::Undetermined,
    }
}

/// How vertex costs are obtained on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightSpec {
    Unit,
    File(PathBuf),
    Random(u64),
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "unit" {
            return Ok(WeightSpec::Unit);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(WeightSpec::File(PathBuf::from(path)));
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad seed in `{s}`")))?;
            return Ok(WeightSpec::Random(seed));
        }
        Err(Error::InvalidInput(format!(
            "weights must be `unit`, `file:<path>` or `random:<seed>`, got `{s}`"
        )))
    }
}

impl WeightSpec {
    pub fn costs_for(&self, g: &Graph) -> Result<Vec<f64>> {
        match self {
            WeightSpec::Unit => Ok(vec![1.0; g.n()]),
            WeightSpec::Random(seed) => Ok(make_weighted(g, *seed)),
            WeightSpec::File(path) => read_weight_file(path, g.n()),
        }
    }
}

pub fn read_weight_file(path: &Path, n: usize) -> Result<Vec<f64>> {
    parse_weights(std::fs::File::open(path)?, n)
}

/// Parses `n <vertex-id> <cost>` lines (1-based ids). Every vertex must be
/// assigned exactly once; `c` lines are comments.
pub fn parse_weights<R: Read>(mut reader: R, n: usize) -> Result<Vec<f64>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut costs = vec![None; n];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") => continue,
            Some("n") => {}
            Some(other) => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown line type `{other}`"),
                })
            }
        }
        let bad = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        let id: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("malformed vertex id"))?;
        let cost: f64 = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("malformed cost"))?;
        if id == 0 || id > n {
            return Err(bad(&format!("vertex {id} out of range [1, {n}]")));
        }
        if !cost.is_finite() || cost < 0.0 {
            return Err(bad("cost must be nonnegative"));
        }
        if costs[id - 1].replace(cost).is_some() {
            return Err(bad(&format!("vertex {id} assigned twice")));
        }
    }
    costs
        .iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| Error::InvalidInput(format!("no cost for vertex {}", v + 1))))
        .collect()
}

pub fn write_weights(costs: &[f64]) -> String {
    costs
        .iter()
        .enumerate()
        .map(|(v, c)| format!("n {} {}\n", v + 1, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn splitmix_reference_output() {
        let mut rng = SplitMix64::from_seed(0u64.to_le_bytes());
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn random_costs_are_in_range_and_reproducible() {
        let g = Graph::empty(5);
        let a = make_weighted(&g, 42);
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|&c| (1.0..=10.0).contains(&c) && c.fract() == 0.0));
        assert_eq!(a, make_weighted(&g, 42));
    }

    #[test]
    fn random_costs_have_expected_mean() {
        let costs = make_weighted(&Graph::empty(1000), 7);
        let mean = costs.iter().sum::<f64>() / 1000.0;
        assert!((5.0..=6.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn screen_outcomes() {
        let isolated = Instance::unit("iso", Graph::empty(5), 5).unwrap();
        assert_eq!(screen(&isolated), ScreenResult::Trivial);
        let k5 = Instance::unit("k5", complete(5), 2).unwrap();
        assert_eq!(screen(&k5), ScreenResult::Infeasible);
        let p3 = Instance::unit("p3", path(3), 2).unwrap();
        assert!(matches!(screen(&p3), ScreenResult::Feasible(_)));
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::unit("x", path(3), 1).is_err());
        assert!(Instance::new("x", path(3), vec![1.0, 2.0], 2).is_err());
        assert!(Instance::new("x", path(3), vec![1.0, -2.0, 1.0], 2).is_err());
    }

    #[test]
    fn weight_spec_parsing() {
        assert_eq!("unit".parse::<WeightSpec>().unwrap(), WeightSpec::Unit);
        assert_eq!("random:9".parse::<WeightSpec>().unwrap(), WeightSpec::Random(9));
        assert_eq!(
            "file:w.txt".parse::<WeightSpec>().unwrap(),
            WeightSpec::File(PathBuf::from("w.txt"))
        );
        assert!("random:x".parse::<WeightSpec>().is_err());
        assert!("other".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn weight_file_round_trip() {
        let costs = vec![3.0, 1.0, 10.0];
        let parsed = parse_weights(write_weights(&costs).as_bytes(), 3).unwrap();
        assert_eq!(parsed, costs);
        assert!(parse_weights("n 1 2\n".as_bytes(), 2).is_err());
        assert!(parse_weights("n 1 2\nn 1 3\nn 2 1\n".as_bytes(), 2).is_err());
        assert!(parse_weights("n 3 2\n".as_bytes(), 2).is_err());
    }
}
