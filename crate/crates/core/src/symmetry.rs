//! Lexicographic fixing along the branching path.
//!
//! At a node with branching sequence `i1, ..., ij` the solver may restrict
//! itself to solutions whose cut vector, read in that order, is
//! lexicographically at least its image under every generator. Each
//! generator yields fixings by scanning the sequence while the compared
//! prefixes are forced equal.

use std::collections::HashMap;

use crate::graph::{Graph, Permutation, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LexOutcome {
    /// Forced values `(vertex, cut?)`; may be empty.
    Fixings(Vec<(usize, bool)>),
    /// The node only contains solutions dominated by a symmetric image.
    Conflict,
}

/// Enforces `x[seq] >=lex x[inverse(seq)]` for one permutation, given by its
/// inverse. `value(v)` reports the current fixing of `v` (`true` = cut).
pub fn lex_fixings<F>(seq: &[usize], value: F, inverse: &Permutation) -> LexOutcome
where
    F: Fn(usize) -> Option<bool>,
{
    let mut forced: HashMap<usize, bool> = HashMap::new();
    let mut order: Vec<(usize, bool)> = Vec::new();
    let current = |v: usize, forced: &HashMap<usize, bool>| forced.get(&v).copied().or_else(|| value(v));
    for &i in seq {
        let j = inverse.apply(i);
        if i == j {
            continue;
        }
        match (current(i, &forced), current(j, &forced)) {
            (Some(a), Some(b)) if a == b => {}
            (Some(true), Some(false)) => break,
            (Some(false), Some(true)) => return LexOutcome::Conflict,
            (Some(false), None) => {
                forced.insert(j, false);
                order.push((j, false));
            }
            (None, Some(true)) => {
                forced.insert(i, true);
                order.push((i, true));
            }
            _ => break,
        }
    }
    LexOutcome::Fixings(order)
}

/// Generators together with their inverses.
#[derive(Clone, Debug, Default)]
pub struct SymmetryState {
    generators: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl SymmetryState {
    /// Keeps only permutations that preserve adjacency and costs.
    pub fn new(g: &Graph, costs: &[f64], generators: Vec<Permutation>) -> Self {
        let generators: Vec<Permutation> = generators
            .into_iter()
            .filter(|p| p.len() == g.n() && p.is_automorphism(g, costs))
            .collect();
        let inverses = generators.iter().map(|p| p.inverse()).collect();
        SymmetryState { generators, inverses }
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Applies every generator repeatedly until no new fixing appears.
    /// Returns the derived fixings in discovery order, or `None` on conflict.
    pub fn propagate<F>(&self, seq: &[usize], value: F) -> Option<Vec<(usize, bool)>>
    where
        F: Fn(usize) -> Option<bool>,
    {
        let mut derived: HashMap<usize, bool> = HashMap::new();
        let mut order = Vec::new();
        loop {
            let mut changed = false;
            for inv in &self.inverses {
                let lookup = |v: usize| derived.get(&v).copied().or_else(|| value(v));
                match lex_fixings(seq, lookup, inv) {
                    LexOutcome::Conflict => return None,
                    LexOutcome::Fixings(f) => {
                        for (v, cut) in f {
                            if derived.insert(v, cut).is_none() {
                                order.push((v, cut));
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return Some(order);
            }
        }
    }

    pub fn orbit_of(&self, v: usize) -> VertexSet {
        orbit_of(v, &self.generators)
    }
}

/// Orbit of `v` under the group generated by `generators`.
pub fn orbit_of(v: usize, generators: &[Permutation]) -> VertexSet {
    let mut orbit = vec![v];
    let mut i = 0;
    while i < orbit.len() {
        let u = orbit[i];
        for g in generators {
            let w = g.apply(u);
            if !orbit.contains(&w) {
                orbit.push(w);
            }
        }
        i += 1;
    }
    VertexSet::from_unsorted(orbit)
}
