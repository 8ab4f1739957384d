//! Undirected simple graphs and the combinatorial queries the solver needs.

mod automorphism;
mod cliques;
mod dimacs;
mod stable;

pub use automorphism::{automorphism_generators, automorphism_generators_with_budget};
pub use cliques::{maximal_cliques, CliqueEnumeration};
pub(crate) use cliques::for_each_maximal_clique;
pub use dimacs::{parse_dimacs, read_dimacs_file, write_dimacs, ParseStats};
pub use stable::{has_stable_set_of_size, StableSetAnswer, DEFAULT_STABLE_SET_BUDGET};

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from arbitrary indices; sorts and removes duplicates.
    pub fn from_unsorted(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet(members)
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(vec![v])
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &on)| on.then_some(v))
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.0 {
            mask[v] = true;
        }
        mask
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut all = self.0.clone();
        all.extend_from_slice(&other.0);
        VertexSet::from_unsorted(all)
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Members shifted to 1-based ids, as used in files and reports.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "}}")
    }
}

/// A bijection on `0..n`, stored as the image of each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "image {image:?} is not a permutation of 0..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(image))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (v, &img) in self.0.iter().enumerate() {
            inv[img] = v;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&v| self.0[v]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(v, &img)| v == img)
    }

    /// True if the permutation preserves adjacency and per-vertex costs.
    pub fn is_automorphism(&self, g: &Graph, costs: &[f64]) -> bool {
        if self.0.len() != g.n() {
            return false;
        }
        (0..g.n()).all(|v| costs[v] == costs[self.0[v]])
            && g
                .edges()
                .iter()
                .all(|&(u, v)| g.has_edge(self.0[u], self.0[v]))
    }
}

/// Simple undirected graph with vertices `0..n`.
///
/// Neighbor lists are sorted; the edge list keeps the insertion order of the
/// input, which the clique-family construction relies on.
#[derive(Clone, Debug)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            matrix: vec![false; n * n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge list; self-loops and repeated edges are
    /// skipped. Returns an error if an endpoint is out of range.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Adds `{u,v}`; returns false for self-loops and existing edges.
    pub(crate) fn add_edge(&mut self, u: usize, v: usize) -> bool {
        let n = self.n();
        if u == v || self.matrix[u * n + v] {
            return false;
        }
        self.matrix[u * n + v] = true;
        self.matrix[v * n + u] = true;
        let pos = self.adjacency[u].binary_search(&v).unwrap_err();
        self.adjacency[u].insert(pos, v);
        let pos = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos, u);
        self.edges.push((u.min(v), u.max(v)));
        true
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n() + v]
    }

    /// Edges as `(min, max)` pairs in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()` in the
    /// order of `keep`.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::empty(keep.len());
        for &(u, v) in &self.edges {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                g.add_edge(index[u], index[v]);
            }
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Open neighborhood `N(S) \ S`.
    pub fn open_neighborhood(&self, s: &VertexSet) -> VertexSet {
        let mask = s.to_mask(self.n());
        let mut out = Vec::new();
        for v in s.iter() {
            out.extend(self.adjacency[v].iter().copied().filter(|&w| !mask[w]));
        }
        VertexSet::from_unsorted(out)
    }

    /// Components of `G[V \ removed]`, ordered by smallest member.
    pub fn connected_components(&self, removed: &VertexSet) -> Vec<VertexSet> {
        self.components_masked(&removed.to_mask(self.n()))
    }

    /// Same as [`Graph::connected_components`] with the removed set as a mask.
    pub fn components_masked(&self, removed: &[bool]) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = removed.to_vec();
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comps.push(VertexSet::from_unsorted(members));
        }
        comps
    }

    /// Number of components of `G[V \ removed]` without materialising them.
    pub fn count_components_masked(&self, removed: &[bool]) -> usize {
        let n = self.n();
        let mut seen = removed.to_vec();
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let members = s.as_slice();
        members
            .iter()
            .enumerate()
            .all(|(i, &u)| members[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_stable(&self, s: &VertexSet) -> bool {
        let members = s.as_slice();
        members
            .iter()
            .enumerate()
            .all(|(i, &u)| members[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

/// Components of `G[V \ removed]`.
pub fn connected_components(g: &Graph, removed: &VertexSet) -> Vec<VertexSet> {
    g.connected_components(removed)
}

pub fn is_clique(g: &Graph, s: &VertexSet) -> bool {
    g.is_clique(s)
}
