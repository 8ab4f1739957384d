use super::{Graph, VertexSet};

pub const DEFAULT_STABLE_SET_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StableSetAnswer {
    /// A stable set of the requested size.
    Yes(VertexSet),
    No,
    /// The node budget ran out before the search concluded.
    Unknown,
}

/// Decides whether `g` has a stable set of size `k`.
///
/// Branch and bound over cliques of the complement; the bound colors the
/// candidates greedily into cliques of `g`, each of which contributes at most
/// one vertex to a stable set.
pub fn has_stable_set_of_size(g: &Graph, k: usize, budget: u64) -> StableSetAnswer {
    if k == 0 {
        return StableSetAnswer::Yes(VertexSet::new());
    }
    if k > g.n() {
        return StableSetAnswer::No;
    }
    // Degree-ascending order finds large stable sets early.
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut search = Search {
        g,
        k,
        budget,
        nodes: 0,
        current: Vec::new(),
    };
    match search.expand(order) {
        Outcome::Found => StableSetAnswer::Yes(VertexSet::from_unsorted(search.current)),
        Outcome::Exhausted => StableSetAnswer::No,
        Outcome::OutOfBudget => StableSetAnswer::Unknown,
    }
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    g: &'a Graph,
    k: usize,
    budget: u64,
    nodes: u64,
    current: Vec<usize>,
}

impl Search<'_> {
    fn expand(&mut self, candidates: Vec<usize>) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        if self.current.len() >= self.k {
            return Outcome::Found;
        }
        if self.current.len() + candidates.len() < self.k {
            return Outcome::Exhausted;
        }
        let (order, colors) = self.color(&candidates);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] < self.k {
                return Outcome::Exhausted;
            }
            let v = order[i];
            let next: Vec<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&w| !self.g.has_edge(v, w))
                .collect();
            self.current.push(v);
            match self.expand(next) {
                Outcome::Exhausted => {}
                other => return other,
            }
            self.current.pop();
        }
        Outcome::Exhausted
    }

    /// Greedy partition of the candidates into cliques of `g`; returns the
    /// candidates sorted by class number together with the (1-based) class
    /// of each.
    fn color(&self, candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in candidates {
            match classes
                .iter_mut()
                .find(|class| class.iter().all(|&w| self.g.has_edge(v, w)))
            {
                Some(class) => class.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(candidates.len());
        let mut colors = Vec::with_capacity(candidates.len());
        for (c, class) in classes.into_iter().enumerate() {
            for v in class {
                order.push(v);
                colors.push(c + 1);
            }
        }
        (order, colors)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alpha_brute_force(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&mask| {
                let s = VertexSet::from_unsorted((0..n).filter(|v| mask >> v & 1 == 1).collect());
                g.is_stable(&s)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn complete_graph_has_alpha_one() {
        let g = complete(5);
        assert_eq!(has_stable_set_of_size(&g, 5, 1000), StableSetAnswer::No);
        assert!(matches!(has_stable_set_of_size(&g, 1, 1000), StableSetAnswer::Yes(_)));
    }

    #[test]
    fn edgeless_graph_is_stable() {
        let g = Graph::empty(6);
        assert!(matches!(has_stable_set_of_size(&g, 6, 1000), StableSetAnswer::Yes(_)));
    }

    #[test]
    fn tiny_budget_reports_unknown() {
        let g = cycle(15);
        assert_eq!(has_stable_set_of_size(&g, 8, 1), StableSetAnswer::Unknown);
    }

    #[test]
    fn agrees_with_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..=12);
            let p = [0.2, 0.4, 0.6][rng.gen_range(0..3)];
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let alpha = alpha_brute_force(&g);
            for k in 1..=n {
                let ans = has_stable_set_of_size(&g, k, 1_000_000);
                match ans {
                    StableSetAnswer::Yes(s) => {
                        assert!(k <= alpha);
                        assert_eq!(s.len(), k);
                        assert!(g.is_stable(&s));
                    }
                    StableSetAnswer::No => assert!(k > alpha),
                    StableSetAnswer::Unknown => panic!("budget too small"),
                }
            }
        }
    }
}
