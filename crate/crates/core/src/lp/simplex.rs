use log::trace;

use super::{
    Basis, LpModel, LpResult, LpStatus, Relation, VarStatus, FEASIBILITY_TOL, OPTIMALITY_TOL, PIVOT_TOL,
};

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: u64,
    /// Pivots between full refactorizations of the basis inverse.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before the bounds of the basic
    /// variables are perturbed, and again before Bland's rule takes over
    /// once the perturbation budget is spent.
    pub degeneracy_threshold: u64,
}

/// Rounds of bound perturbation per solve before falling back to Bland.
const MAX_PERTURBATION_ROUNDS: u32 = 3;
const PERTURBATION_SCALE: f64 = 1e-6;

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 200_000,
            refactor_interval: 50,
            degeneracy_threshold: 50,
        }
    }
}

pub fn solve(model: &LpModel, warm: Option<&Basis>) -> LpResult {
    solve_with(model, warm, &SimplexOptions::default())
}

/// Solves `min c x` subject to the model rows and bounds.
///
/// Internally each row gets a slack `s_i = a_i x` bounded according to its
/// relation, so the equality system is `A x - s = 0`. Phase 1 minimizes the
/// total bound violation of the basic variables starting from whatever basis
/// is supplied, which lets a warm start survive bound and row changes.
pub fn solve_with(model: &LpModel, warm: Option<&Basis>, opts: &SimplexOptions) -> LpResult {
    let mut s = Simplex::new(model, warm);
    let status = s.run(opts);
    s.into_result(status)
}

struct Simplex<'a> {
    model: &'a LpModel,
    n: usize,
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Unperturbed bounds.
    base_lower: Vec<f64>,
    base_upper: Vec<f64>,
    perturbed: bool,
    perturbation_rounds: u32,
    cost: Vec<f64>,
    status: Vec<VarStatus>,
    x: Vec<f64>,
    head: Vec<usize>,
    /// Row-major inverse of the basis matrix; row `r` belongs to `head[r]`.
    binv: Vec<f64>,
    duals: Vec<f64>,
    iterations: u64,
}

enum Leaving {
    BoundFlip,
    Row(usize, VarStatus),
}

impl<'a> Simplex<'a> {
    fn new(model: &'a LpModel, warm: Option<&Basis>) -> Self {
        let n = model.num_columns();
        let m = model.num_rows();
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        let mut cost = Vec::with_capacity(n + m);
        for c in &model.columns {
            lower.push(c.lower);
            upper.push(c.upper);
            cost.push(c.cost);
        }
        for r in &model.rows {
            let (lo, hi) = match r.relation {
                Relation::Ge => (r.rhs, f64::INFINITY),
                Relation::Le => (f64::NEG_INFINITY, r.rhs),
                Relation::Eq => (r.rhs, r.rhs),
            };
            lower.push(lo);
            upper.push(hi);
            cost.push(0.0);
        }

        let mut status = vec![VarStatus::AtLower; n + m];
        for st in status.iter_mut().skip(n) {
            *st = VarStatus::Basic;
        }
        if let Some(b) = warm {
            let mut candidate = status.clone();
            for (j, st) in b.columns.iter().take(n).enumerate() {
                candidate[j] = *st;
            }
            for (i, st) in b.rows.iter().take(m).enumerate() {
                candidate[n + i] = *st;
            }
            if candidate.iter().filter(|&&s| s == VarStatus::Basic).count() == m {
                status = candidate;
            }
        }
        let head: Vec<usize> = (0..n + m).filter(|&j| status[j] == VarStatus::Basic).collect();

        let mut s = Simplex {
            model,
            n,
            m,
            base_lower: lower.clone(),
            base_upper: upper.clone(),
            lower,
            upper,
            perturbed: false,
            perturbation_rounds: 0,
            cost,
            status,
            x: vec![0.0; n + m],
            head,
            binv: Vec::new(),
            duals: vec![0.0; m],
            iterations: 0,
        };
        for j in 0..n + m {
            if s.status[j] != VarStatus::Basic {
                s.place_nonbasic(j);
            }
        }
        s.refactor();
        s
    }

    /// Puts a nonbasic variable on a finite bound matching its status, or at
    /// zero when it is free.
    fn place_nonbasic(&mut self, j: usize) {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        let at_upper = match self.status[j] {
            VarStatus::AtUpper => hi.is_finite() || !lo.is_finite(),
            _ => !lo.is_finite() && hi.is_finite(),
        };
        if at_upper && hi.is_finite() {
            self.status[j] = VarStatus::AtUpper;
            self.x[j] = hi;
        } else {
            self.status[j] = VarStatus::AtLower;
            self.x[j] = if lo.is_finite() { lo } else { 0.0 };
        }
    }

    /// Relaxes the finite bounds of every basic variable by a small
    /// variable-specific amount so degenerate pivots become strict steps.
    fn perturb(&mut self) {
        for c in 0..self.m {
            let j = self.head[c];
            // Deterministic spread in [1, 2).
            let spread = 1.0 + ((j as f64 + 1.0) * 0.618_033_988_749_895).fract();
            if self.lower[j].is_finite() {
                self.lower[j] -= PERTURBATION_SCALE * spread * (1.0 + self.lower[j].abs());
            }
            if self.upper[j].is_finite() {
                self.upper[j] += PERTURBATION_SCALE * spread * (1.0 + self.upper[j].abs());
            }
        }
        self.perturbed = true;
        self.perturbation_rounds += 1;
        trace!("perturbed basic bounds (round {})", self.perturbation_rounds);
    }

    /// Restores the exact bounds, moving nonbasic variables back onto them.
    fn unperturb(&mut self) {
        self.lower.clone_from(&self.base_lower);
        self.upper.clone_from(&self.base_upper);
        for j in 0..self.n + self.m {
            if self.status[j] != VarStatus::Basic {
                self.place_nonbasic(j);
            }
        }
        self.perturbed = false;
        self.refactor();
    }

    fn for_column<F: FnMut(usize, f64)>(&self, j: usize, mut f: F) {
        if j < self.n {
            for &(r, a) in &self.model.columns[j].entries {
                f(r, a);
            }
        } else {
            f(j - self.n, -1.0);
        }
    }

    /// Rebuilds the basis inverse from scratch. Basic columns that turn out
    /// to be linearly dependent are swapped for slacks of uncovered rows.
    fn refactor(&mut self) {
        let m = self.m;
        loop {
            let mut b = vec![0.0; m * m];
            for c in 0..m {
                let j = self.head[c];
                let mut put = |r: usize, a: f64| b[r * m + c] += a;
                if j < self.n {
                    for &(r, a) in &self.model.columns[j].entries {
                        put(r, a);
                    }
                } else {
                    put(j - self.n, -1.0);
                }
            }
            let mut inv = vec![0.0; m * m];
            for i in 0..m {
                inv[i * m + i] = 1.0;
            }
            let mut row_used = vec![false; m];
            let mut pivot_row = vec![usize::MAX; m];
            let mut dependent = Vec::new();
            for c in 0..m {
                let mut best = None;
                let mut best_abs = 1e-9;
                for r in 0..m {
                    if !row_used[r] && b[r * m + c].abs() > best_abs {
                        best_abs = b[r * m + c].abs();
                        best = Some(r);
                    }
                }
                let Some(p) = best else {
                    dependent.push(c);
                    continue;
                };
                row_used[p] = true;
                pivot_row[c] = p;
                let piv = b[p * m + c];
                for k in 0..m {
                    b[p * m + k] /= piv;
                    inv[p * m + k] /= piv;
                }
                for r in 0..m {
                    if r == p {
                        continue;
                    }
                    let f = b[r * m + c];
                    if f == 0.0 {
                        continue;
                    }
                    for k in 0..m {
                        b[r * m + k] -= f * b[p * m + k];
                        inv[r * m + k] -= f * inv[p * m + k];
                    }
                }
            }
            if dependent.is_empty() {
                let mut binv = vec![0.0; m * m];
                for c in 0..m {
                    let p = pivot_row[c];
                    binv[c * m..(c + 1) * m].copy_from_slice(&inv[p * m..(p + 1) * m]);
                }
                self.binv = binv;
                break;
            }
            let free_rows: Vec<usize> = (0..m).filter(|&r| !row_used[r]).collect();
            for (&c, &r) in dependent.iter().zip(&free_rows) {
                let old = self.head[c];
                self.status[old] = VarStatus::AtLower;
                self.place_nonbasic(old);
                let slack = self.n + r;
                if self.status[slack] == VarStatus::Basic {
                    // Slack already basic elsewhere cannot happen: its row would be covered.
                    unreachable!("basic slack on an uncovered row");
                }
                self.status[slack] = VarStatus::Basic;
                self.head[c] = slack;
            }
            trace!("basis repair replaced {} dependent columns", dependent.len());
        }
        self.recompute_basic_values();
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.n + m {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_column(j, |r, a| rhs[r] += a * xj);
            }
        }
        for c in 0..m {
            let row = &self.binv[c * m..(c + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
            self.x[self.head[c]] = -v;
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - FEASIBILITY_TOL {
            -1.0
        } else if v > self.upper[j] + FEASIBILITY_TOL {
            1.0
        } else {
            0.0
        }
    }

    fn compute_duals(&mut self, phase_one: bool) {
        let m = self.m;
        let mut y = vec![0.0; m];
        for c in 0..m {
            let j = self.head[c];
            let cb = if phase_one { self.infeasibility(j) } else { self.cost[j] };
            if cb != 0.0 {
                for (yk, b) in y.iter_mut().zip(&self.binv[c * m..(c + 1) * m]) {
                    *yk += cb * b;
                }
            }
        }
        self.duals = y;
    }

    fn reduced_cost(&self, j: usize, phase_one: bool) -> f64 {
        let mut d = if phase_one { 0.0 } else { self.cost[j] };
        self.for_column(j, |r, a| d -= self.duals[r] * a);
        d
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(j, |r, a| {
            for c in 0..m {
                alpha[c] += self.binv[c * m + r] * a;
            }
        });
        alpha
    }

    fn run(&mut self, opts: &SimplexOptions) -> LpStatus {
        let mut since_refactor = 0usize;
        let mut fresh = true;
        let mut degenerate_streak = 0u64;
        loop {
            if since_refactor >= opts.refactor_interval {
                self.refactor();
                since_refactor = 0;
                fresh = true;
            }
            let phase_one = self.head.iter().any(|&j| self.infeasibility(j) != 0.0);
            self.compute_duals(phase_one);
            if degenerate_streak >= opts.degeneracy_threshold
                && !self.perturbed
                && self.perturbation_rounds < MAX_PERTURBATION_ROUNDS
            {
                self.perturb();
                degenerate_streak = 0;
            }
            let bland = degenerate_streak >= opts.degeneracy_threshold;

            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.n + self.m {
                if self.status[j] == VarStatus::Basic {
                    continue;
                }
                let d = self.reduced_cost(j, phase_one);
                let can_increase = self.upper[j] > self.x[j] + FEASIBILITY_TOL;
                let can_decrease = self.lower[j] < self.x[j] - FEASIBILITY_TOL;
                let eligible = (d < -OPTIMALITY_TOL && can_increase) || (d > OPTIMALITY_TOL && can_decrease);
                if !eligible {
                    continue;
                }
                match entering {
                    None => entering = Some((j, d)),
                    Some((_, best)) if !bland && d.abs() > best.abs() => entering = Some((j, d)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }

            let Some((j, d)) = entering else {
                if self.perturbed {
                    self.unperturb();
                    since_refactor = 0;
                    fresh = true;
                    degenerate_streak = 0;
                    continue;
                }
                if !fresh {
                    self.refactor();
                    since_refactor = 0;
                    fresh = true;
                    continue;
                }
                return if phase_one { LpStatus::Infeasible } else { LpStatus::Optimal };
            };
            if self.iterations >= opts.max_iterations {
                if self.perturbed {
                    self.unperturb();
                }
                return LpStatus::IterationLimit;
            }
            self.iterations += 1;

            let dir = if d < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.ftran(j);
            let (step, leaving) = self.ratio_test(j, dir, &alpha, phase_one, bland);
            if !step.is_finite() {
                if phase_one {
                    // Phase 1 is bounded below; an unbounded ray means the
                    // factorization has drifted.
                    self.refactor();
                    since_refactor = 0;
                    fresh = true;
                    degenerate_streak = opts.degeneracy_threshold;
                    continue;
                }
                if self.perturbed {
                    self.unperturb();
                }
                return LpStatus::Unbounded;
            }

            if step > 1e-12 {
                degenerate_streak = 0;
                self.x[j] += dir * step;
                for c in 0..self.m {
                    if alpha[c] != 0.0 {
                        let v = self.head[c];
                        self.x[v] -= dir * alpha[c] * step;
                    }
                }
            } else {
                degenerate_streak += 1;
            }

            match leaving {
                Leaving::BoundFlip => {
                    self.status[j] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.place_nonbasic(j);
                }
                Leaving::Row(r, side) => {
                    let out = self.head[r];
                    self.status[out] = side;
                    self.x[out] = if side == VarStatus::AtUpper { self.upper[out] } else { self.lower[out] };
                    self.head[r] = j;
                    self.status[j] = VarStatus::Basic;
                    self.pivot(r, &alpha);
                    since_refactor += 1;
                    fresh = false;
                }
            }
        }
    }

    /// Harris two-pass ratio test (textbook minimum ratio under Bland's rule).
    /// In phase 1 an infeasible basic variable blocks at the first bound it
    /// reaches, so the step never passes a breakpoint of the phase-1 objective.
    fn ratio_test(&self, j: usize, dir: f64, alpha: &[f64], phase_one: bool, bland: bool) -> (f64, Leaving) {
        let tol = if bland { 0.0 } else { FEASIBILITY_TOL };
        // (row, exact limit, relaxed limit, side)
        let mut candidates: Vec<(usize, f64, f64, VarStatus)> = Vec::new();
        for (c, &a) in alpha.iter().enumerate() {
            if a.abs() < PIVOT_TOL {
                continue;
            }
            let v = self.head[c];
            let xb = self.x[v];
            let (lo, hi) = (self.lower[v], self.upper[v]);
            let rate = -dir * a;
            let entry = if rate < 0.0 {
                if phase_one && xb > hi + FEASIBILITY_TOL {
                    Some(((xb - hi) / -rate, (xb - hi + tol) / -rate, VarStatus::AtUpper))
                } else if xb < lo - FEASIBILITY_TOL || !lo.is_finite() {
                    None
                } else {
                    Some(((xb - lo).max(0.0) / -rate, (xb - lo + tol).max(0.0) / -rate, VarStatus::AtLower))
                }
            } else if phase_one && xb < lo - FEASIBILITY_TOL {
                Some(((lo - xb) / rate, (lo - xb + tol) / rate, VarStatus::AtLower))
            } else if xb > hi + FEASIBILITY_TOL || !hi.is_finite() {
                None
            } else {
                Some(((hi - xb).max(0.0) / rate, (hi - xb + tol).max(0.0) / rate, VarStatus::AtUpper))
            };
            if let Some((exact, relaxed, side)) = entry {
                candidates.push((c, exact, relaxed, side));
            }
        }

        let flip = self.upper[j] - self.lower[j];
        let bound = candidates.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
        if flip <= bound || candidates.is_empty() {
            return (flip, Leaving::BoundFlip);
        }

        let chosen = if bland {
            let min = candidates.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            candidates
                .iter()
                .filter(|e| e.1 <= min)
                .min_by_key(|e| self.head[e.0])
                .copied()
        } else {
            candidates
                .iter()
                .filter(|e| e.1 <= bound)
                .max_by(|a, b| alpha[a.0].abs().total_cmp(&alpha[b.0].abs()).then(b.0.cmp(&a.0)))
                .copied()
        };
        let (r, exact, _, side) = chosen.expect("ratio test candidate");
        (exact.max(0.0), Leaving::Row(r, side))
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for (c, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[c];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(x, p)| *x -= f * p);
            }
        }
        for (i, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + i];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(x, p)| *x -= f * p);
            }
        }
    }

    fn into_result(mut self, status: LpStatus) -> LpResult {
        let n = self.n;
        if status == LpStatus::Optimal {
            self.compute_duals(false);
        }
        let reduced_costs = (0..n).map(|j| self.reduced_cost(j, false)).collect();
        let primal: Vec<f64> = self.x[..n].to_vec();
        LpResult {
            status,
            objective: self.model.objective_value(&primal),
            primal,
            duals: self.duals.clone(),
            reduced_costs,
            basis: Basis {
                columns: self.status[..n].to_vec(),
                rows: self.status[n..].to_vec(),
            },
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LpModel::new();
        let x = lp.add_column(1.0, 0.0, f64::INFINITY, &[]);
        let r = lp.add_row(&[(x, 1.0)], Relation::Ge, 3.0);
        let res = solve(&lp, None);
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.objective - 3.0).abs() < 1e-9);
        assert!((res.duals[r] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_without_rows() {
        let mut lp = LpModel::new();
        lp.add_column(-1.0, 0.0, f64::INFINITY, &[]);
        assert_eq!(solve(&lp, None).status, LpStatus::Unbounded);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LpModel::new();
        let x = lp.add_column(1.0, 0.0, 1.0, &[]);
        lp.add_row(&[(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve(&lp, None).status, LpStatus::Infeasible);
    }

    #[test]
    fn le_row_dual_is_nonpositive() {
        // min -x - y, x + y <= 4, x <= 3
        let mut lp = LpModel::new();
        let x = lp.add_column(-1.0, 0.0, 3.0, &[]);
        let y = lp.add_column(-1.0, 0.0, f64::INFINITY, &[]);
        let r = lp.add_row(&[(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        let res = solve(&lp, None);
        assert!((res.objective + 4.0).abs() < 1e-9);
        assert!((res.duals[r] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_warm_start_after_bound_change() {
        // min x + 2y, x + y = 2, x - y >= -1
        let mut lp = LpModel::new();
        let x = lp.add_column(1.0, 0.0, f64::INFINITY, &[]);
        let y = lp.add_column(2.0, 0.0, f64::INFINITY, &[]);
        lp.add_row(&[(x, 1.0), (y, 1.0)], Relation::Eq, 2.0);
        lp.add_row(&[(x, 1.0), (y, -1.0)], Relation::Ge, -1.0);
        let res = solve(&lp, None);
        assert!((res.objective - 2.0).abs() < 1e-9);
        lp.set_bounds(x, 0.0, 0.5);
        let warm = solve(&lp, Some(&res.basis));
        let cold = solve(&lp, None);
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - cold.objective).abs() < 1e-9);
        assert!((warm.objective - 3.5).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut lp = LpModel::new();
        let x = lp.add_column(1.0, 0.0, f64::INFINITY, &[]);
        let y = lp.add_column(1.0, 0.0, f64::INFINITY, &[]);
        lp.add_row(&[(x, 1.0), (y, 2.0)], Relation::Ge, 3.0);
        lp.add_row(&[(x, 2.0), (y, 1.0)], Relation::Ge, 3.0);
        let opts = SimplexOptions {
            max_iterations: 0,
            ..Default::default()
        };
        assert_eq!(solve_with(&lp, None, &opts).status, LpStatus::IterationLimit);
    }
}
