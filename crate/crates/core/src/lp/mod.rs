//! Bounded-variable LP engine used by the branch-and-cut driver.
//!
//! Models are maximization problems `max cᵀx` subject to `lo_r ≤ a_rᵀx ≤ up_r`
//! and `lo_j ≤ x_j ≤ up_j`. Rows can be appended between solves and the
//! previous basis is reused.

mod dump;
mod lu;
mod simplex;

pub use dump::write_lp;
pub use lu::{DenseLu, Singular};
pub use simplex::{LpSolver, SimplexOptions};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coefs: Vec<(usize, f64)>,
    pub lo: f64,
    pub up: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    obj: Vec<f64>,
    col_lo: Vec<f64>,
    col_up: Vec<f64>,
    col_names: Vec<String>,
    rows: Vec<LpRow>,
}

impl LpModel {
    /// `ncols` variables in `[0, ∞)` with zero objective.
    pub fn new(ncols: usize) -> Self {
        Self {
            obj: vec![0.0; ncols],
            col_lo: vec![0.0; ncols],
            col_up: vec![f64::INFINITY; ncols],
            col_names: (0..ncols).map(|j| format!("x{j}")).collect(),
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.obj.len()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, j: usize, c: f64) {
        self.obj[j] = c;
    }

    pub fn objective(&self) -> &[f64] {
        &self.obj
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, up: f64) {
        assert!(lo <= up, "empty bound interval for column {j}");
        self.col_lo[j] = lo;
        self.col_up[j] = up;
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.col_lo[j], self.col_up[j])
    }

    pub fn set_name(&mut self, j: usize, name: impl Into<String>) {
        self.col_names[j] = name.into();
    }

    pub fn name(&self, j: usize) -> &str {
        &self.col_names[j]
    }

    /// Appends `lo ≤ Σ coefs ≤ up`; duplicate column entries are summed and
    /// zeros dropped.
    pub fn add_row(&mut self, coefs: &[(usize, f64)], lo: f64, up: f64) -> usize {
        assert!(lo <= up, "empty row interval");
        let mut merged: Vec<(usize, f64)> = coefs.to_vec();
        merged.sort_by_key(|&(j, _)| j);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(merged.len());
        for (j, a) in merged {
            assert!(j < self.ncols(), "row references column {j} of {}", self.ncols());
            assert!(a.is_finite(), "non-finite coefficient");
            match out.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => out.push((j, a)),
            }
        }
        out.retain(|&(_, a)| a != 0.0);
        self.rows.push(LpRow { coefs: out, lo, up });
        self.rows.len() - 1
    }

    pub fn add_le(&mut self, coefs: &[(usize, f64)], rhs: f64) -> usize {
        self.add_row(coefs, f64::NEG_INFINITY, rhs)
    }

    pub fn add_ge(&mut self, coefs: &[(usize, f64)], rhs: f64) -> usize {
        self.add_row(coefs, rhs, f64::INFINITY)
    }

    pub fn add_eq(&mut self, coefs: &[(usize, f64)], rhs: f64) -> usize {
        self.add_row(coefs, rhs, rhs)
    }

    pub fn row(&self, i: usize) -> &LpRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    /// `cᵀx` for a full column vector.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.obj.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.col_lo[j] - v).max(v - self.col_up[j]);
        }
        for row in &self.rows {
            let act: f64 = row.coefs.iter().map(|&(j, a)| a * x[j]).sum();
            worst = worst.max(row.lo - act).max(act - row.up);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite, held at zero.
    Free,
}

/// Status of every column followed by every row's logical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub cols: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// Row duals of the maximization problem.
    pub row_duals: Vec<f64>,
    pub iterations: usize,
    pub basis: Basis,
    pub max_primal_violation: f64,
    pub max_dual_violation: f64,
    /// Set when the result is not optimal.
    pub diagnostic: Option<String>,
}

/// Solves `model`, starting from `warm` when given.
pub fn lp_solve(model: &LpModel, warm: Option<&Basis>) -> LpResult {
    let mut solver = LpSolver::new(model.clone());
    if let Some(b) = warm {
        solver.set_basis(b);
    }
    solver.solve()
}
