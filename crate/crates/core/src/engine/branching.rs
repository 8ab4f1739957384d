//! Reliability pseudocost branching on the cut variables.

/// Values closer than this to an integer count as integral.
pub const FRACTIONALITY_TOL: f64 = 1e-6;

/// Pseudocost observations per vertex and direction, stored as objective
/// gain per unit of change in the cut variable.
#[derive(Clone, Debug)]
pub struct PseudocostStore {
    down: Vec<(f64, u32)>,
    up: Vec<(f64, u32)>,
}

impl PseudocostStore {
    pub fn new(n: usize) -> Self {
        PseudocostStore {
            down: vec![(0.0, 0); n],
            up: vec![(0.0, 0); n],
        }
    }

    /// Records the bound gain of a child; `frac` is how far the variable
    /// moved (its value for the down child, one minus it for the up child).
    pub fn record(&mut self, v: usize, up: bool, gain: f64, frac: f64) {
        if frac <= FRACTIONALITY_TOL || !gain.is_finite() {
            return;
        }
        let slot = if up { &mut self.up[v] } else { &mut self.down[v] };
        slot.0 += gain.max(0.0) / frac;
        slot.1 += 1;
    }

    pub fn observations(&self, v: usize) -> (u32, u32) {
        (self.down[v].1, self.up[v].1)
    }

    pub fn is_reliable(&self, v: usize, eta: u32) -> bool {
        self.down[v].1 >= eta && self.up[v].1 >= eta
    }

    fn mean(slots: &[(f64, u32)]) -> f64 {
        let (sum, count) = slots
            .iter()
            .filter(|s| s.1 > 0)
            .fold((0.0, 0u32), |(a, c), s| (a + s.0 / s.1 as f64, c + 1));
        if count == 0 {
            1.0
        } else {
            sum / count as f64
        }
    }

    /// Per-unit estimates `(down, up)`; directions without observations fall
    /// back to the average over all vertices.
    pub fn estimate(&self, v: usize) -> (f64, f64) {
        let get = |slots: &[(f64, u32)]| {
            let (s, c) = slots[v];
            if c > 0 {
                s / c as f64
            } else {
                Self::mean(slots)
            }
        };
        (get(&self.down), get(&self.up))
    }
}

#[derive(Clone, Debug)]
pub struct BranchingOptions {
    /// Observations per direction before a candidate's pseudocosts are trusted.
    pub reliability: u32,
    /// Simplex pivot cap of a strong-branching probe.
    pub probe_pivots: u64,
    /// Most candidates probed at one node.
    pub max_probes: usize,
}

impl Default for BranchingOptions {
    fn default() -> Self {
        BranchingOptions {
            reliability: 4,
            probe_pivots: 100,
            max_probes: 16,
        }
    }
}

pub fn fractionality(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

pub fn is_fractional(x: f64) -> bool {
    x < 1.0 - FRACTIONALITY_TOL && fractionality(x) > FRACTIONALITY_TOL
}

fn product_score(down: f64, up: f64) -> f64 {
    down.max(1e-6) * up.max(1e-6)
}

/// Picks the branching vertex among `candidates` (vertex, LP value).
///
/// Unreliable candidates, most fractional first, are probed with
/// `probe(v, up)`, which returns the child objective gain or `None` when
/// the probe did not finish; completed probes are recorded as observations.
/// The score is the product of the two estimated gains; ties go to the
/// lowest vertex index.
pub fn select_branch_variable<P>(
    candidates: &[(usize, f64)],
    store: &mut PseudocostStore,
    opts: &BranchingOptions,
    mut probe: P,
) -> Option<usize>
where
    P: FnMut(usize, bool) -> Option<f64>,
{
    if candidates.is_empty() {
        return None;
    }
    let mut unreliable: Vec<(usize, f64)> = candidates
        .iter()
        .copied()
        .filter(|&(v, _)| !store.is_reliable(v, opts.reliability))
        .collect();
    unreliable.sort_by(|a, b| fractionality(b.1).total_cmp(&fractionality(a.1)).then(a.0.cmp(&b.0)));
    unreliable.truncate(opts.max_probes);

    let mut probed: Vec<(usize, f64, f64)> = Vec::new();
    for &(v, x) in &unreliable {
        let frac_down = x - x.floor();
        let frac_up = 1.0 - frac_down;
        let down = probe(v, false);
        let up = probe(v, true);
        if let Some(g) = down {
            store.record(v, false, g, frac_down);
        }
        if let Some(g) = up {
            store.record(v, true, g, frac_up);
        }
        if let (Some(d), Some(u)) = (down, up) {
            probed.push((v, d, u));
        }
    }

    let mut best: Option<(usize, f64)> = None;
    for &(v, x) in candidates {
        let score = match probed.iter().find(|p| p.0 == v) {
            Some(&(_, d, u)) => product_score(d, u),
            None => {
                let (pd, pu) = store.estimate(v);
                let f = x - x.floor();
                product_score(pd * f, pu * (1.0 - f))
            }
        };
        let better = match best {
            None => true,
            Some((bv, bs)) => score > bs || (score == bs && v < bv),
        };
        if better {
            best = Some((v, score));
        }
    }
    best.map(|b| b.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_candidate_is_chosen() {
        let mut store = PseudocostStore::new(3);
        let v = select_branch_variable(&[(1, 0.5)], &mut store, &BranchingOptions::default(), |_, _| Some(1.0));
        assert_eq!(v, Some(1));
    }

    #[test]
    fn reliable_scores_dominate() {
        let mut store = PseudocostStore::new(2);
        for _ in 0..4 {
            store.record(0, false, 2.0, 0.5);
            store.record(0, true, 2.0, 0.5);
            store.record(1, false, 0.1, 0.5);
            store.record(1, true, 0.1, 0.5);
        }
        let mut probes = 0;
        let v = select_branch_variable(
            &[(0, 0.5), (1, 0.5)],
            &mut store,
            &BranchingOptions::default(),
            |_, _| {
                probes += 1;
                None
            },
        );
        assert_eq!(v, Some(0));
        assert_eq!(probes, 0);
    }

    #[test]
    fn unreliable_candidates_are_probed() {
        let mut store = PseudocostStore::new(3);
        let mut seen = Vec::new();
        let v = select_branch_variable(
            &[(0, 0.3), (2, 0.5)],
            &mut store,
            &BranchingOptions::default(),
            |v, up| {
                seen.push((v, up));
                Some(if v == 0 { 3.0 } else { 1.0 })
            },
        );
        assert_eq!(v, Some(0));
        assert_eq!(seen, vec![(2, false), (2, true), (0, false), (0, true)]);
        assert_eq!(store.observations(0), (1, 1));
    }

    #[test]
    fn fractionality_checks() {
        assert!(is_fractional(0.5));
        assert!(!is_fractional(1.0 - 1e-8));
        assert!(!is_fractional(2.5));
        assert!(!is_fractional(0.0));
    }
}
