//! Cost-preserving automorphisms by individualization and color refinement.
//!
//! The search follows a fixed base `b1, b2, ...` (first vertex of the first
//! non-singleton cell after each individualization). Working from the deepest
//! level upwards, it looks for automorphisms fixing `b1..b(l-1)` that move
//! `bl` to every vertex of its cell not already in its orbit. With an
//! unlimited budget the result is a strong generating set of the full group;
//! under a budget it is a generating set of a subgroup. Every returned
//! permutation is verified against the graph.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::{Graph, Permutation};

pub const DEFAULT_AUTOMORPHISM_BUDGET: u64 = 1_000_000;

pub fn automorphism_generators(g: &Graph, costs: &[f64]) -> Vec<Permutation> {
    automorphism_generators_with_budget(g, costs, DEFAULT_AUTOMORPHISM_BUDGET)
}

pub fn automorphism_generators_with_budget(g: &Graph, costs: &[f64], budget: u64) -> Vec<Permutation> {
    assert_eq!(costs.len(), g.n(), "one cost per vertex");
    let n = g.n();
    if n < 2 {
        return Vec::new();
    }
    let mut search = Search {
        g,
        costs,
        budget,
        nodes: 0,
    };

    let mut root = initial_colors(g, costs);
    refine(g, &mut root);

    // Base and the partition in force before each base point is individualized.
    let mut levels: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut current = root;
    while let Some(b) = first_vertex_of_first_nontrivial_cell(&current) {
        let mut next = current.clone();
        individualize(&mut next, b);
        refine(g, &mut next);
        levels.push((current, b));
        current = next;
    }

    let mut generators: Vec<Permutation> = Vec::new();
    'levels: for level in (0..levels.len()).rev() {
        let (partition, base) = &levels[level];
        let cell_color = partition[*base];
        let mut left = partition.clone();
        individualize(&mut left, *base);
        let left_trace = refine(g, &mut left);
        for v in 0..n {
            if v == *base || partition[v] != cell_color {
                continue;
            }
            if orbit_contains(&generators, n, *base, v) {
                continue;
            }
            if search.exhausted() {
                break 'levels;
            }
            search.nodes += 1;
            let mut right = partition.clone();
            individualize(&mut right, v);
            if refine(g, &mut right) != left_trace {
                continue;
            }
            if let Some(p) = search.find_mapping(left.clone(), right) {
                generators.push(p);
            }
        }
    }
    generators
}

struct Search<'a> {
    g: &'a Graph,
    costs: &'a [f64],
    budget: u64,
    nodes: u64,
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.nodes >= self.budget
    }

    /// Extends the correspondence between two equally refined colorings to an
    /// automorphism, if one exists below this search node.
    fn find_mapping(&mut self, left: Vec<usize>, right: Vec<usize>) -> Option<Permutation> {
        let Some(x) = first_vertex_of_first_nontrivial_cell(&left) else {
            return self.leaf(&left, &right);
        };
        let color = left[x];
        let mut left_next = left;
        individualize(&mut left_next, x);
        let left_trace = refine(self.g, &mut left_next);
        for y in 0..right.len() {
            if right[y] != color {
                continue;
            }
            if self.exhausted() {
                return None;
            }
            self.nodes += 1;
            let mut right_next = right.clone();
            individualize(&mut right_next, y);
            if refine(self.g, &mut right_next) != left_trace {
                continue;
            }
            if let Some(p) = self.find_mapping(left_next.clone(), right_next) {
                return Some(p);
            }
        }
        None
    }

    fn leaf(&self, left: &[usize], right: &[usize]) -> Option<Permutation> {
        let n = left.len();
        let mut by_color = vec![usize::MAX; n];
        for (v, &c) in right.iter().enumerate() {
            by_color[c] = v;
        }
        let image: Vec<usize> = left.iter().map(|&c| by_color[c]).collect();
        let p = Permutation::from_images(image).ok()?;
        (!p.is_identity() && p.is_automorphism(self.g, self.costs)).then_some(p)
    }
}

fn initial_colors(g: &Graph, costs: &[f64]) -> Vec<usize> {
    let keys: Vec<(u64, usize)> = (0..g.n()).map(|v| (costs[v].to_bits(), g.degree(v))).collect();
    let mut unique = keys.clone();
    unique.sort_unstable();
    unique.dedup();
    keys.iter().map(|k| unique.binary_search(k).unwrap()).collect()
}

/// Splits cells by neighbor-color multisets until stable. Colors are
/// renumbered canonically (by sorted key), so two colorings that correspond
/// under some isomorphism stay in correspondence. Returns a hash of the
/// refinement trace.
fn refine(g: &Graph, colors: &mut [usize]) -> u64 {
    let n = colors.len();
    let mut hasher = DefaultHasher::new();
    let mut num_colors = colors.iter().max().map_or(0, |c| c + 1);
    loop {
        let keys: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut unique: Vec<&(usize, Vec<usize>)> = keys.iter().collect();
        unique.sort_unstable();
        unique.dedup();
        for key in &unique {
            key.hash(&mut hasher);
        }
        let next: Vec<usize> = keys
            .iter()
            .map(|k| unique.binary_search(&k).unwrap())
            .collect();
        let count = unique.len();
        colors.copy_from_slice(&next);
        if count == num_colors {
            break;
        }
        num_colors = count;
    }
    let mut sizes = vec![0usize; num_colors];
    for &c in colors.iter() {
        sizes[c] += 1;
    }
    sizes.hash(&mut hasher);
    hasher.finish()
}

fn individualize(colors: &mut [usize], v: usize) {
    let fresh = colors.iter().max().map_or(0, |c| c + 1);
    colors[v] = fresh;
}

fn first_vertex_of_first_nontrivial_cell(colors: &[usize]) -> Option<usize> {
    let num_colors = colors.iter().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; num_colors];
    for &c in colors {
        sizes[c] += 1;
    }
    let cell = sizes.iter().position(|&s| s > 1)?;
    colors.iter().position(|&c| c == cell)
}

fn orbit_contains(generators: &[Permutation], n: usize, from: usize, target: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        if u == target {
            return true;
        }
        for g in generators {
            let w = g.apply(u);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use std::collections::HashSet;

    fn group_closure(gens: &[Permutation], n: usize) -> HashSet<Permutation> {
        let mut group: HashSet<Permutation> = HashSet::new();
        let id = Permutation::identity(n);
        let mut frontier = vec![id.clone()];
        group.insert(id);
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if group.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        group
    }

    #[test]
    fn square_has_dihedral_group() {
        let g = cycle(4);
        let gens = automorphism_generators(&g, &[1.0; 4]);
        assert_eq!(group_closure(&gens, 4).len(), 8);
    }

    #[test]
    fn path_endpoints_swap() {
        let g = path(3);
        let gens = automorphism_generators(&g, &[1.0; 3]);
        assert_eq!(gens, vec![Permutation::from_images(vec![2, 1, 0]).unwrap()]);
    }

    #[test]
    fn costs_break_mirror_symmetry() {
        let g = path(3);
        assert!(automorphism_generators(&g, &[1.0, 1.0, 2.0]).is_empty());
    }

    #[test]
    fn group_orders_of_small_graphs() {
        // |Aut(C6)| = 12, |Aut(K4)| = 24, |Aut(K_{3,3})| = 72.
        assert_eq!(group_closure(&automorphism_generators(&cycle(6), &[1.0; 6]), 6).len(), 12);
        assert_eq!(group_closure(&automorphism_generators(&complete(4), &[1.0; 4]), 4).len(), 24);
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                edges.push((u, v));
            }
        }
        let k33 = Graph::from_edges(6, &edges).unwrap();
        assert_eq!(group_closure(&automorphism_generators(&k33, &[1.0; 6]), 6).len(), 72);
    }

    #[test]
    fn petersen_group_order() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        let g = Graph::from_edges(10, &edges).unwrap();
        let gens = automorphism_generators(&g, &[1.0; 10]);
        for p in &gens {
            assert!(p.is_automorphism(&g, &[1.0; 10]));
        }
        assert_eq!(group_closure(&gens, 10).len(), 120);
    }

    #[test]
    fn zero_budget_is_sound_and_empty() {
        let g = cycle(6);
        assert!(automorphism_generators_with_budget(&g, &[1.0; 6], 0).is_empty());
    }
}
