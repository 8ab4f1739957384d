#![allow(dead_code)]

use kvcut_core::graph::{Graph, VertexSet};
use kvcut_core::instance::{make_weighted, Instance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Random instance; odd seeds get random weights, even seeds unit costs.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, p: f64, k: usize, weight_seed: Option<u64>) -> Instance {
    let g = random_graph(rng, n, p);
    let costs = match weight_seed {
        Some(s) => make_weighted(&g, s),
        None => vec![1.0; n],
    };
    Instance::new(format!("rand-n{n}-p{p}-k{k}"), g, costs, k).unwrap()
}

/// Components left after deleting `removed`, by depth-first search.
pub fn count_components(g: &Graph, removed: &[bool]) -> usize {
    let n = g.n();
    let mut seen = removed.to_vec();
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Exhaustive minimum cut cost leaving at least `k` components.
pub fn exhaustive_optimum(inst: &Instance) -> Option<f64> {
    let n = inst.n();
    let mut best: Option<f64> = None;
    for mask in 0u64..1 << n {
        let removed: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        if count_components(&inst.graph, &removed) >= inst.k {
            let c: f64 = (0..n).filter(|&v| removed[v]).map(|v| inst.costs[v]).sum();
            if best.map_or(true, |b| c < b) {
                best = Some(c);
            }
        }
    }
    best
}

pub fn mask_set(mask: u64, n: usize) -> VertexSet {
    VertexSet::from_unsorted((0..n).filter(|&v| mask >> v & 1 == 1).collect())
}

/// Random instances with n in [8, 14], edge probability cycling through
/// 0.2, 0.3 and 0.5, k cycling through 2..=5, alternating unit and random
/// weights.
pub fn suite(seed: u64, count: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = r.gen_range(8..=14);
            let p = [0.2, 0.3, 0.5][i % 3];
            let k = 2 + i % 4;
            let weights = (i % 2 == 1).then(|| r.gen());
            random_instance(&mut r, n, p, k, weights)
        })
        .collect()
}
