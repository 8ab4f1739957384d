use kvcut_core::lp::{solve, solve_with, LpModel, LpStatus, Relation, SimplexOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Dense {
    cost: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl Dense {
    fn model(&self) -> LpModel {
        let mut lp = LpModel::new();
        for (&c, &u) in self.cost.iter().zip(&self.upper) {
            lp.add_column(c, 0.0, u, &[]);
        }
        for (a, rel, b) in &self.rows {
            let entries: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
            lp.add_row(&entries, *rel, *b);
        }
        lp
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let tol = 1e-7;
        x.iter().zip(&self.upper).all(|(&v, &u)| v >= -tol && v <= u + tol)
            && self.rows.iter().all(|(a, rel, b)| {
                let act: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Ge => act >= b - tol,
                    Relation::Le => act <= b + tol,
                    Relation::Eq => (act - b).abs() <= tol,
                }
            })
    }
}

fn random_dense(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Dense {
    let cost = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let upper = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
    // Rows are built around a known interior point so most instances are feasible.
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let act: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
            if rng.gen_bool(0.5) {
                (a, Relation::Ge, act - rng.gen_range(0.0..1.0))
            } else {
                (a, Relation::Le, act + rng.gen_range(0.0..1.0))
            }
        })
        .collect();
    Dense { cost, upper, rows }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all basic solutions obtained by making `n` of the available
/// constraints (rows and variable bounds) tight.
fn vertex_enumeration(d: &Dense) -> Option<f64> {
    let n = d.cost.len();
    let mut hyperplanes: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        hyperplanes.push((e.clone(), 0.0));
        hyperplanes.push((e, d.upper[j]));
    }
    for (a, _, b) in &d.rows {
        hyperplanes.push((a.clone(), *b));
    }
    let h = hyperplanes.len();
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        h: usize,
        pick: &mut Vec<usize>,
        planes: &[(Vec<f64>, f64)],
        d: &Dense,
        best: &mut Option<f64>,
    ) {
        if pick.len() == n {
            let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
            let b = pick.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = solve_square(a, b) {
                if d.feasible(&x) {
                    let v: f64 = d.cost.iter().zip(&x).map(|(c, q)| c * q).sum();
                    if best.map_or(true, |b| v < b) {
                        *best = Some(v);
                    }
                }
            }
            return;
        }
        for i in start..h {
            pick.push(i);
            rec(i + 1, n, h, pick, planes, d, best);
            pick.pop();
        }
    }
    rec(0, n, h, &mut pick, &hyperplanes, d, &mut best);
    best
}

#[test]
fn matches_vertex_enumeration_on_small_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let d = random_dense(&mut rng, n, m);
        let res = solve(&d.model(), None);
        match vertex_enumeration(&d) {
            Some(v) => {
                assert_eq!(res.status, LpStatus::Optimal);
                assert!((res.objective - v).abs() < 1e-6, "{} vs {}", res.objective, v);
                assert!(d.feasible(&res.primal));
            }
            None => assert_eq!(res.status, LpStatus::Infeasible),
        }
    }
}

#[test]
fn strong_duality_and_complementary_slackness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let n = 10 + trial * 2;
        let m = 10 + trial * 2;
        let d = random_dense(&mut rng, n, m);
        let lp = d.model();
        let res = solve(&lp, None);
        assert_eq!(res.status, LpStatus::Optimal);
        assert!(d.feasible(&res.primal));
        let act = lp.row_activities(&res.primal);
        let mut dual_obj = 0.0;
        for (i, (_, rel, b)) in d.rows.iter().enumerate() {
            let y = res.duals[i];
            match rel {
                Relation::Ge => assert!(y >= -1e-9),
                Relation::Le => assert!(y <= 1e-9),
                Relation::Eq => {}
            }
            assert!((y * (act[i] - b)).abs() < 1e-6, "row slackness");
            dual_obj += y * b;
        }
        for j in 0..n {
            let dj = res.reduced_costs[j];
            let xj = res.primal[j];
            // Reduced cost sign must match the bound the variable sits on.
            if xj < 1e-7 {
                assert!(dj >= -1e-7);
            } else if xj > d.upper[j] - 1e-7 {
                assert!(dj <= 1e-7);
            } else {
                assert!(dj.abs() < 1e-7);
            }
            dual_obj += dj * xj;
        }
        assert!((dual_obj - res.objective).abs() <= 1e-6 * (1.0 + res.objective.abs()));
    }
}

#[test]
fn incremental_columns_match_monolithic_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let d = random_dense(&mut rng, 6, 5);
        let full = solve(&d.model(), None);

        let mut lp = LpModel::new();
        for j in 0..3 {
            lp.add_column(d.cost[j], 0.0, d.upper[j], &[]);
        }
        for (a, rel, b) in &d.rows {
            let entries: Vec<(usize, f64)> = a[..3].iter().copied().enumerate().collect();
            lp.add_row(&entries, *rel, *b);
        }
        let partial = solve(&lp, None);
        for j in 3..6 {
            let entries: Vec<(usize, f64)> = d.rows.iter().enumerate().map(|(i, r)| (i, r.0[j])).collect();
            lp.add_column(d.cost[j], 0.0, d.upper[j], &entries);
        }
        let grown = solve(&lp, Some(&partial.basis));
        assert_eq!(grown.status, full.status);
        if full.status == LpStatus::Optimal {
            assert!((grown.objective - full.objective).abs() < 1e-7);
            if partial.status == LpStatus::Optimal {
                assert!(grown.objective <= partial.objective + 1e-9);
            }
        }
    }
}

#[test]
fn negative_reduced_cost_column_decreases_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 25 {
        let d = random_dense(&mut rng, 5, 4);
        let mut lp = d.model();
        let base = solve(&lp, None);
        if base.status != LpStatus::Optimal {
            continue;
        }
        let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let priced: f64 = coeffs.iter().zip(&base.duals).map(|(a, y)| a * y).sum();
        let cost = priced - rng.gen_range(0.1..2.0);
        let entries: Vec<(usize, f64)> = coeffs.iter().copied().enumerate().collect();
        lp.add_column(cost, 0.0, 1.0, &entries);
        let warm = solve(&lp, Some(&base.basis));
        let cold = solve(&lp, None);
        assert!(warm.objective <= base.objective + 1e-9);
        assert!((warm.objective - cold.objective).abs() < 1e-7);
        checked += 1;
    }
}

#[test]
fn violated_row_increases_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    while checked < 25 {
        let d = random_dense(&mut rng, 5, 3);
        let mut lp = d.model();
        let base = solve(&lp, None);
        if base.status != LpStatus::Optimal {
            continue;
        }
        let a: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..2.0)).collect();
        let act: f64 = a.iter().zip(&base.primal).map(|(p, q)| p * q).sum();
        let entries: Vec<(usize, f64)> = a.iter().copied().enumerate().collect();
        lp.add_row(&entries, Relation::Ge, act + 0.5);
        let next = solve(&lp, Some(&base.basis));
        if next.status == LpStatus::Optimal {
            assert!(next.objective >= base.objective - 1e-9);
            assert!((next.objective - solve(&lp, None).objective).abs() < 1e-7);
        }
        checked += 1;
    }
}

/// Rows all pass through one point, so the optimum is heavily degenerate.
/// A threshold of one pivot forces every anti-degeneracy mechanism to run.
#[test]
fn degenerate_lps_survive_perturbation_and_bland() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let eager = SimplexOptions {
        degeneracy_threshold: 1,
        ..SimplexOptions::default()
    };
    for _ in 0..150 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(2..=6);
        let mut d = random_dense(&mut rng, n, m);
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=1) as f64).collect();
        for (a, _, b) in d.rows.iter_mut() {
            *b = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        }
        let res = solve_with(&d.model(), None, &eager);
        let plain = solve(&d.model(), None);
        match vertex_enumeration(&d) {
            Some(v) => {
                assert_eq!(res.status, LpStatus::Optimal);
                assert!((res.objective - v).abs() < 1e-6, "{} vs {}", res.objective, v);
                assert!(d.feasible(&res.primal));
                assert!((plain.objective - v).abs() < 1e-6);
            }
            None => assert_eq!(res.status, LpStatus::Infeasible),
        }
    }
}
