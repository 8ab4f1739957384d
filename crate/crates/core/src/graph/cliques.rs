use super::{Graph, VertexSet};

/// Result of a budgeted maximal-clique enumeration.
#[derive(Clone, Debug)]
pub struct CliqueEnumeration {
    pub cliques: Vec<VertexSet>,
    /// False if the budget stopped the enumeration early.
    pub complete: bool,
}

/// Enumerates the maximal cliques of `g` (Bron–Kerbosch with Tomita pivoting),
/// visiting at most `budget` recursion nodes. Isolated vertices are reported
/// as singleton cliques.
pub fn maximal_cliques(g: &Graph, budget: u64) -> CliqueEnumeration {
    let mut cliques = Vec::new();
    let complete = for_each_maximal_clique(g, budget, |c| cliques.push(VertexSet::from_unsorted(c.to_vec())));
    CliqueEnumeration { cliques, complete }
}

/// Calls `visit` once per maximal clique. Returns false if the budget ran out.
pub(crate) fn for_each_maximal_clique<F: FnMut(&[usize])>(g: &Graph, budget: u64, mut visit: F) -> bool {
    let mut state = BronKerbosch {
        g,
        budget,
        nodes: 0,
        r: Vec::new(),
    };
    let p: Vec<usize> = (0..g.n()).collect();
    state.expand(p, Vec::new(), &mut visit)
}

struct BronKerbosch<'a> {
    g: &'a Graph,
    budget: u64,
    nodes: u64,
    r: Vec<usize>,
}

impl BronKerbosch<'_> {
    fn expand<F: FnMut(&[usize])>(&mut self, mut p: Vec<usize>, mut x: Vec<usize>, visit: &mut F) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if p.is_empty() {
            if x.is_empty() {
                visit(&self.r);
            }
            return true;
        }
        // Pivot maximizing |P ∩ N(u)| over P ∪ X.
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| (p.iter().filter(|&&w| self.g.has_edge(u, w)).count(), std::cmp::Reverse(u)))
            .unwrap();
        let branch: Vec<usize> = p.iter().copied().filter(|&v| !self.g.has_edge(pivot, v)).collect();
        for v in branch {
            let np: Vec<usize> = p.iter().copied().filter(|&w| self.g.has_edge(v, w)).collect();
            let nx: Vec<usize> = x.iter().copied().filter(|&w| self.g.has_edge(v, w)).collect();
            self.r.push(v);
            let ok = self.expand(np, nx, visit);
            self.r.pop();
            if !ok {
                return false;
            }
            p.retain(|&w| w != v);
            x.push(v);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn triangle_has_one_maximal_clique() {
        let e = maximal_cliques(&complete(3), 1000);
        assert!(e.complete);
        assert_eq!(e.cliques, vec![VertexSet::from_unsorted(vec![0, 1, 2])]);
    }

    #[test]
    fn path_cliques_are_its_edges() {
        let mut e = maximal_cliques(&path(3), 1000).cliques;
        e.sort();
        assert_eq!(
            e,
            vec![VertexSet::from_unsorted(vec![0, 1]), VertexSet::from_unsorted(vec![1, 2])]
        );
    }

    #[test]
    fn every_reported_clique_is_maximal() {
        // Two triangles sharing an edge plus a pendant vertex.
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let e = maximal_cliques(&g, 1000);
        assert_eq!(e.cliques.len(), 3);
        for c in &e.cliques {
            assert!(g.is_clique(c));
            for w in 0..g.n() {
                if !c.contains(w) {
                    assert!(!c.iter().all(|u| g.has_edge(u, w)));
                }
            }
        }
    }

    #[test]
    fn budget_stops_enumeration() {
        let e = maximal_cliques(&cycle(30), 3);
        assert!(!e.complete);
    }
}
