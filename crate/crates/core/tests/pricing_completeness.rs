mod common;

use common::{mask_set, random_graph, rng};
use kvcut_core::graph::{Graph, VertexSet};
use kvcut_core::master::{build_clique_family, CliqueFamily, DualPrices, FamilyMode};
use kvcut_core::pricing::{price, BranchState, PricingOptions, Stage, VIOLATION_TOL};
use rand::Rng;

/// Best violation over every nonempty subset compatible with the fixings,
/// computed from the definitions alone.
fn exhaustive_best(g: &Graph, family: &CliqueFamily, d: &DualPrices, bs: &BranchState) -> f64 {
    let n = g.n();
    let mut best = f64::NEG_INFINITY;
    for mask in 1u64..1 << n {
        let s = mask_set(mask, n);
        if s.iter().any(|v| bs.fixed_to_cut().contains(v)) {
            continue;
        }
        let closed = bs
            .fixed_to_keep()
            .iter()
            .all(|v| s.contains(v) || g.neighbors(v).iter().all(|&w| !s.contains(w)));
        if !closed {
            continue;
        }
        let gain: f64 = s.iter().map(|v| d.mu[v]).sum();
        let loss: f64 = family
            .cliques()
            .iter()
            .zip(&d.pi)
            .filter(|(c, _)| c.iter().any(|v| s.contains(v)))
            .map(|(_, p)| p)
            .sum();
        best = best.max(d.sigma + gain - loss);
    }
    best
}

fn random_duals<R: Rng>(rng: &mut R, n: usize, cliques: usize, signed_mu: bool) -> DualPrices {
    let lo = if signed_mu { -0.5 } else { 0.0 };
    DualPrices {
        sigma: if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) },
        mu: (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(lo..1.0) }).collect(),
        pi: (0..cliques).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.5) }).collect(),
    }
}

fn check(g: &Graph, family: &CliqueFamily, d: &DualPrices, bs: &BranchState, label: &str) {
    let out = price(g, family, d, bs, &PricingOptions::default());
    let brute = exhaustive_best(g, family, d, bs);
    match out.best_violation() {
        Some(v) => {
            assert!((v - brute).abs() < 1e-9, "{label}: pricing {v} vs exhaustive {brute}");
            for (s, viol) in &out.columns {
                assert!(bs.admits(g, s), "{label}: inadmissible column {s}");
                assert!((d.violation(family, s) - viol).abs() < 1e-9);
            }
        }
        None => assert!(brute <= VIOLATION_TOL, "{label}: missed violation {brute}"),
    }
}

#[test]
fn two_stage_pricing_matches_exhaustive_search() {
    let mut r = rng(11);
    for trial in 0..200 {
        let n = r.gen_range(2..=9);
        let p = [0.2, 0.35, 0.5, 0.8][trial % 4];
        let g = random_graph(&mut r, n, p);
        let mode = [FamilyMode::Cover, FamilyMode::Partition, FamilyMode::Edges][trial % 3];
        let family = build_clique_family(&g, mode);
        let d = random_duals(&mut r, n, family.len(), trial % 5 == 0);
        let mut bs = BranchState::new();
        if trial % 2 == 1 {
            for v in 0..n {
                match r.gen_range(0..6) {
                    0 => {
                        bs.fix(v, true);
                    }
                    1 => {
                        bs.fix(v, false);
                    }
                    _ => {}
                }
            }
        }
        check(&g, &family, &d, &bs, &format!("trial {trial}"));
    }
}

#[test]
fn zero_cover_duals_fall_through_to_stage_two() {
    // Path u - w with a single edge clique: stage 1 keeps the empty set and
    // stage 2 returns a singleton.
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let family = build_clique_family(&g, FamilyMode::Cover);
    let d = DualPrices {
        sigma: 1.0,
        mu: vec![0.0, 0.0],
        pi: vec![0.0; family.len()],
    };
    let out = price(&g, &family, &d, &BranchState::new(), &PricingOptions::default());
    assert_eq!(out.stage, Some(Stage::Two));
    assert_eq!(out.columns[0].0, VertexSet::singleton(0));
}
