//! Dense revised simplex with bounded variables, row duals and warm starts.
//!
//! Models are always minimized. Rows are stored through their columns so that
//! column generation only appends.

mod simplex;

pub use simplex::{solve, solve_with, SimplexOptions};

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Reduced cost a nonbasic variable must beat to enter the basis.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Pivot elements smaller than this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
struct Row {
    relation: Relation,
    rhs: f64,
}

#[derive(Clone, Debug)]
struct Column {
    cost: f64,
    lower: f64,
    upper: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct LpModel {
    columns: Vec<Column>,
    rows: Vec<Row>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable with the given objective cost, bounds and coefficients
    /// in existing rows. Returns its index.
    pub fn add_column(&mut self, cost: f64, lower: f64, upper: f64, entries: &[(usize, f64)]) -> usize {
        assert!(lower <= upper, "inconsistent bounds [{lower}, {upper}]");
        for &(r, _) in entries {
            assert!(r < self.rows.len(), "row index {r} out of range");
        }
        let mut entries: Vec<(usize, f64)> = entries.iter().copied().filter(|&(_, a)| a != 0.0).collect();
        entries.sort_by_key(|&(r, _)| r);
        self.columns.push(Column {
            cost,
            lower,
            upper,
            entries,
        });
        self.columns.len() - 1
    }

    /// Adds a row `sum(coef * var) <relation> rhs` over existing variables.
    pub fn add_row(&mut self, entries: &[(usize, f64)], relation: Relation, rhs: f64) -> usize {
        let r = self.rows.len();
        for &(j, a) in entries {
            assert!(j < self.columns.len(), "variable index {j} out of range");
            if a != 0.0 {
                self.columns[j].entries.push((r, a));
            }
        }
        self.rows.push(Row { relation, rhs });
        r
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        assert!(lower <= upper, "inconsistent bounds [{lower}, {upper}]");
        let c = &mut self.columns[var];
        c.lower = lower;
        c.upper = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        let c = &self.columns[var];
        (c.lower, c.upper)
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.columns[var].cost = cost;
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.columns[var].cost
    }

    pub fn set_rhs(&mut self, row: usize, rhs: f64) {
        self.rows[row].rhs = rhs;
    }

    pub fn rhs(&self, row: usize) -> f64 {
        self.rows[row].rhs
    }

    pub fn relation(&self, row: usize) -> Relation {
        self.rows[row].relation
    }

    pub fn set_relation(&mut self, row: usize, relation: Relation) {
        self.rows[row].relation = relation;
    }

    pub fn column_entries(&self, var: usize) -> &[(usize, f64)] {
        &self.columns[var].entries
    }

    /// Row activities `A x` for a given primal vector.
    pub fn row_activities(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.rows.len()];
        for (col, &xj) in self.columns.iter().zip(x) {
            if xj != 0.0 {
                for &(r, a) in &col.entries {
                    act[r] += a * xj;
                }
            }
        }
        act
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, &xj)| c.cost * xj).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Basis snapshot: one status per structural variable and one per row slack.
/// Columns and rows added after the snapshot was taken default to nonbasic
/// at their lower bound and basic slack respectively.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Basis {
    pub columns: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Row duals: nonnegative on `>=` rows, nonpositive on `<=` rows.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis: Basis,
    pub iterations: u64,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
