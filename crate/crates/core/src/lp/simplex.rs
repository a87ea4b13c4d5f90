//! Dual simplex over `A x − s = 0` with bounds on both `x` and the row
//! logicals `s`.
//!
//! The basis matrix is factored through its kernel: the rows whose logical is
//! nonbasic, restricted to the basic structural columns. Later pivots are
//! appended as product-form eta columns until the next refactorization.
//! Infinite bounds that a nonbasic variable must sit at are replaced by
//! `±BIG`; a solution resting on such a bound is reported unbounded.

use super::lu::DenseLu;
use super::{Basis, LpModel, LpResult, LpStatus, VarStatus};

const BIG: f64 = 1e7;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
    pub zero_tol: f64,
    pub refactor_every: usize,
    /// Per `solve` call; `None` picks a limit from the model size.
    pub max_iterations: Option<usize>,
    /// Iterations without objective progress before the costs are perturbed,
    /// and again before switching to Bland's rule.
    pub stall_limit: usize,
    /// Relative size of the cost perturbation.
    pub perturbation: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
            zero_tol: 1e-11,
            refactor_every: 100,
            max_iterations: None,
            stall_limit: 50,
            perturbation: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
struct Factor {
    lu: DenseLu,
    kernel_rows: Vec<usize>,
    kernel_pos: Vec<usize>,
    kernel_vars: Vec<usize>,
    slack: Vec<(usize, usize)>,
    etas: Vec<Eta>,
}

/// Stateful solver: keeps its basis between calls so that added rows and
/// tightened bounds are handled by warm dual simplex iterations.
#[derive(Debug, Clone)]
pub struct LpSolver {
    model: LpModel,
    pub opts: SimplexOptions,
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    pos: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    factor: Option<Factor>,
    /// Original costs while a perturbation is active.
    saved_cost: Option<Vec<f64>>,
}

enum Ratio {
    Enter { q: usize, flips: Vec<usize> },
    Unbounded,
}

impl LpSolver {
    pub fn new(model: LpModel) -> Self {
        let n = model.ncols();
        let mut s = Self {
            model: LpModel::new(0),
            opts: SimplexOptions::default(),
            n,
            m: 0,
            cols: vec![Vec::new(); n],
            cost: model.objective().iter().map(|c| -c).collect(),
            lo: (0..n).map(|j| model.bounds(j).0).collect(),
            up: (0..n).map(|j| model.bounds(j).1).collect(),
            status: Vec::with_capacity(n),
            head: Vec::new(),
            pos: vec![NONE; n],
            x: vec![0.0; n],
            d: vec![0.0; n],
            factor: None,
            saved_cost: None,
        };
        for j in 0..n {
            let st = s.initial_status(j);
            s.status.push(st);
        }
        let rows = model.rows().to_vec();
        s.model = LpModel { rows: Vec::new(), ..model };
        for row in rows {
            s.add_row(&row.coefs, row.lo, row.up);
        }
        s
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    fn initial_status(&self, j: usize) -> VarStatus {
        let (lo, up, c) = (self.lo[j], self.up[j], self.cost[j]);
        if c > 0.0 || (c == 0.0 && lo.is_finite()) {
            VarStatus::AtLower
        } else if c < 0.0 || up.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    /// Appends a row; its logical enters the basis.
    pub fn add_row(&mut self, coefs: &[(usize, f64)], lo: f64, up: f64) -> usize {
        let r = self.model.add_row(coefs, lo, up);
        for &(j, a) in &self.model.row(r).coefs {
            self.cols[j].push((r, a));
        }
        let v = self.n + self.m;
        self.cost.push(0.0);
        self.lo.push(lo);
        self.up.push(up);
        self.status.push(VarStatus::Basic);
        self.pos.push(self.m);
        self.head.push(v);
        self.x.push(0.0);
        self.d.push(0.0);
        self.m += 1;
        self.factor = None;
        r
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, up: f64) {
        self.model.set_bounds(j, lo, up);
        self.lo[j] = lo;
        self.up[j] = up;
        if self.status[j] == VarStatus::Free && (lo.is_finite() || up.is_finite()) {
            self.status[j] = if lo.is_finite() { VarStatus::AtLower } else { VarStatus::AtUpper };
        }
    }

    pub fn basis(&self) -> Basis {
        Basis { cols: self.status[..self.n].to_vec(), rows: self.status[self.n..].to_vec() }
    }

    /// Installs a basis; rows beyond those it covers get basic logicals.
    /// An inconsistent basis is replaced by the slack basis.
    pub fn set_basis(&mut self, b: &Basis) {
        let (n, m) = (self.n, self.m);
        if b.cols.len() != n || b.rows.len() > m {
            return self.slack_basis();
        }
        let mut status: Vec<VarStatus> = b.cols.clone();
        status.extend(b.rows.iter().copied());
        status.resize(n + m, VarStatus::Basic);
        if status.iter().filter(|&&s| s == VarStatus::Basic).count() != m {
            return self.slack_basis();
        }
        for (j, st) in status.iter_mut().enumerate() {
            if *st == VarStatus::Free && (self.lo[j].is_finite() || self.up[j].is_finite()) {
                *st = if self.lo[j].is_finite() { VarStatus::AtLower } else { VarStatus::AtUpper };
            }
        }
        self.status = status;
        self.head = (0..n + m).filter(|&v| self.status[v] == VarStatus::Basic).collect();
        self.pos = vec![NONE; n + m];
        for (p, &v) in self.head.iter().enumerate() {
            self.pos[v] = p;
        }
        self.factor = None;
    }

    pub fn slack_basis(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in 0..n {
            self.status[j] = self.initial_status(j);
        }
        for r in 0..m {
            self.status[n + r] = VarStatus::Basic;
        }
        self.head = (n..n + m).collect();
        self.pos = vec![NONE; n + m];
        for (p, &v) in self.head.iter().enumerate() {
            self.pos[v] = p;
        }
        self.factor = None;
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => {
                if self.lo[j].is_finite() {
                    self.lo[j]
                } else {
                    -BIG
                }
            }
            VarStatus::AtUpper => {
                if self.up[j].is_finite() {
                    self.up[j]
                } else {
                    BIG
                }
            }
            VarStatus::Free => 0.0,
            VarStatus::Basic => self.x[j],
        }
    }

    fn on_artificial_bound(&self, j: usize) -> bool {
        match self.status[j] {
            VarStatus::AtLower => !self.lo[j].is_finite(),
            VarStatus::AtUpper => !self.up[j].is_finite(),
            _ => false,
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.up[j]
    }

    /// Adds `scale · column(j)` into a row-indexed vector.
    fn scatter_col(&self, j: usize, scale: f64, out: &mut [f64]) {
        if j < self.n {
            for &(r, a) in &self.cols[j] {
                out[r] += scale * a;
            }
        } else {
            out[j - self.n] -= scale;
        }
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.cols[j].iter().map(|&(r, a)| a * y[r]).sum()
        } else {
            -y[j - self.n]
        }
    }

    fn nonbasic_status_for(&self, j: usize) -> VarStatus {
        let (lo, up) = (self.lo[j], self.up[j]);
        if lo.is_finite() && (!up.is_finite() || (self.x[j] - lo).abs() <= (self.x[j] - up).abs()) {
            VarStatus::AtLower
        } else if up.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    /// Rebuilds the factorization; returns whether the basis was repaired.
    fn refactor(&mut self) -> bool {
        let (n, m) = (self.n, self.m);
        let mut repaired = false;
        loop {
            let mut slack = Vec::new();
            let mut kernel_pos = Vec::new();
            let mut row_kernel = vec![0usize; m];
            for (p, &v) in self.head.iter().enumerate() {
                if v >= n {
                    slack.push((v - n, p));
                    row_kernel[v - n] = NONE;
                } else {
                    kernel_pos.push(p);
                }
            }
            let kernel_rows: Vec<usize> = (0..m).filter(|&r| row_kernel[r] != NONE).collect();
            for (k, &r) in kernel_rows.iter().enumerate() {
                row_kernel[r] = k;
            }
            let t = kernel_pos.len();
            debug_assert_eq!(t, kernel_rows.len());
            let mut k = vec![0.0; t * t];
            for (b, &p) in kernel_pos.iter().enumerate() {
                for &(r, a) in &self.cols[self.head[p]] {
                    let row = row_kernel[r];
                    if row != NONE {
                        k[row * t + b] = a;
                    }
                }
            }
            match DenseLu::factor(t, k, self.opts.pivot_tol) {
                Ok(lu) => {
                    let kernel_vars = kernel_pos.iter().map(|&p| self.head[p]).collect();
                    self.factor = Some(Factor { lu, kernel_rows, kernel_pos, kernel_vars, slack, etas: Vec::new() });
                    return repaired;
                }
                Err(sing) => {
                    repaired = true;
                    for (&b, &a) in sing.dependent_cols.iter().zip(&sing.unused_rows) {
                        let p = kernel_pos[b];
                        let out = self.head[p];
                        self.status[out] = self.nonbasic_status_for(out);
                        self.pos[out] = NONE;
                        let logical = n + kernel_rows[a];
                        self.status[logical] = VarStatus::Basic;
                        self.head[p] = logical;
                        self.pos[logical] = p;
                    }
                }
            }
        }
    }

    /// `B⁻¹ b` for a row-indexed `b`, returned by basis position.
    fn ftran(&self, b: &[f64]) -> Vec<f64> {
        let f = self.factor.as_ref().expect("factorized");
        let mut u = vec![0.0; self.m];
        let mut kb: Vec<f64> = f.kernel_rows.iter().map(|&r| b[r]).collect();
        f.lu.solve(&mut kb);
        let mut acc = vec![0.0; self.m];
        for (i, &p) in f.kernel_pos.iter().enumerate() {
            u[p] = kb[i];
            if kb[i] != 0.0 {
                self.scatter_col(f.kernel_vars[i], kb[i], &mut acc);
            }
        }
        for &(r, p) in &f.slack {
            u[p] = acc[r] - b[r];
        }
        for eta in &f.etas {
            let up = u[eta.pos] / eta.pivot;
            u[eta.pos] = up;
            if up != 0.0 {
                for &(i, a) in &eta.entries {
                    u[i] -= a * up;
                }
            }
        }
        u
    }

    /// `c B⁻¹` for a position-indexed `c`, returned by row.
    fn btran(&self, mut c: Vec<f64>) -> Vec<f64> {
        let f = self.factor.as_ref().expect("factorized");
        for eta in f.etas.iter().rev() {
            let s: f64 = eta.entries.iter().map(|&(i, a)| c[i] * a).sum();
            c[eta.pos] = (c[eta.pos] - s) / eta.pivot;
        }
        let mut y = vec![0.0; self.m];
        for &(r, p) in &f.slack {
            y[r] = -c[p];
        }
        let mut kc: Vec<f64> = f
            .kernel_pos
            .iter()
            .zip(&f.kernel_vars)
            .map(|(&p, &j)| c[p] - self.cols[j].iter().map(|&(r, a)| a * y[r]).sum::<f64>())
            .collect();
        f.lu.solve_transpose(&mut kc);
        for (k, &r) in f.kernel_rows.iter().enumerate() {
            y[r] = kc[k];
        }
        y
    }

    fn compute_primal(&mut self) {
        let total = self.n + self.m;
        let mut rhs = vec![0.0; self.m];
        for j in 0..total {
            if self.status[j] != VarStatus::Basic {
                let v = self.nonbasic_value(j);
                self.x[j] = v;
                if v != 0.0 {
                    self.scatter_col(j, -v, &mut rhs);
                }
            }
        }
        let xb = self.ftran(&rhs);
        for (p, &v) in self.head.iter().enumerate() {
            self.x[v] = xb[p];
        }
    }

    fn compute_duals(&mut self) -> Vec<f64> {
        let cb: Vec<f64> = self.head.iter().map(|&v| self.cost[v]).collect();
        let y = self.btran(cb);
        for j in 0..self.n + self.m {
            self.d[j] = if self.status[j] == VarStatus::Basic { 0.0 } else { self.cost[j] - self.dot_col(j, &y) };
        }
        y
    }

    fn dual_violation(&self, j: usize) -> f64 {
        if self.is_fixed(j) {
            return 0.0;
        }
        match self.status[j] {
            VarStatus::Basic => 0.0,
            VarStatus::AtLower => (-self.d[j]).max(0.0),
            VarStatus::AtUpper => self.d[j].max(0.0),
            VarStatus::Free => self.d[j].abs(),
        }
    }

    /// Moves nonbasic variables to the bound their reduced cost asks for.
    fn make_dual_feasible(&mut self) -> usize {
        let mut flips = 0;
        for j in 0..self.n + self.m {
            if self.dual_violation(j) > self.opts.dual_tol {
                self.status[j] = if self.d[j] < 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                flips += 1;
            }
        }
        if flips > 0 {
            self.compute_primal();
        }
        flips
    }

    fn primal_infeasibility(&self, v: usize) -> f64 {
        (self.lo[v] - self.x[v]).max(self.x[v] - self.up[v]).max(0.0)
    }

    fn objective_min(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.x[j]).sum()
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (p, &v) in self.head.iter().enumerate() {
            let inf = self.primal_infeasibility(v);
            if inf <= self.opts.feas_tol {
                continue;
            }
            let better = match best {
                None => true,
                Some((bp, bi)) => {
                    if bland {
                        v < self.head[bp]
                    } else {
                        inf > bi
                    }
                }
            };
            if better {
                best = Some((p, inf));
            }
        }
        best.map(|(p, _)| p)
    }

    fn ratio_test(&self, alpha: &[f64], sgn: f64, delta: f64, bland: bool) -> Ratio {
        let tol = self.opts.pivot_tol;
        let mut cand: Vec<(usize, f64, f64)> = Vec::new();
        for j in 0..self.n + self.m {
            let st = self.status[j];
            if st == VarStatus::Basic || self.is_fixed(j) {
                continue;
            }
            let at = -sgn * alpha[j];
            let ok = match st {
                VarStatus::AtLower => at > tol,
                VarStatus::AtUpper => at < -tol,
                VarStatus::Free => at.abs() > tol,
                VarStatus::Basic => false,
            };
            if ok {
                let ratio = if st == VarStatus::Free { 0.0 } else { (self.d[j] / at).max(0.0) };
                cand.push((j, ratio, at.abs()));
            }
        }
        if cand.is_empty() {
            return Ratio::Unbounded;
        }
        cand.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        if bland {
            return Ratio::Enter { q: cand[0].0, flips: Vec::new() };
        }
        let mut slope = delta;
        let mut flips = Vec::new();
        for (i, &(j, ratio, mag)) in cand.iter().enumerate() {
            let range = self.up[j] - self.lo[j];
            if range.is_finite() && slope - mag * range > 0.0 && i + 1 < cand.len() {
                slope -= mag * range;
                flips.push(j);
                continue;
            }
            let window = ratio + 1e-9_f64.max(ratio * 1e-9);
            let q = cand[i..]
                .iter()
                .take_while(|c| c.1 <= window)
                .fold(cand[i], |best, c| if c.2 > best.2 { *c } else { best })
                .0;
            return Ratio::Enter { q, flips };
        }
        unreachable!("loop returns at the last candidate")
    }

    /// Shifts the cost of every nonbasic boxed-side variable away from its
    /// dual feasibility boundary by a small pseudo-random amount.
    fn perturb_costs(&mut self) {
        let base = self.opts.perturbation;
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let saved = self.cost.clone();
        for j in 0..self.n + self.m {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                continue;
            }
            let xi = base * (1.0 + self.cost[j].abs()) * (1.0 + (state >> 11) as f64 / (1u64 << 53) as f64);
            let shift = match self.status[j] {
                VarStatus::AtLower => xi,
                VarStatus::AtUpper => -xi,
                _ => continue,
            };
            self.cost[j] += shift;
            self.d[j] += shift;
        }
        self.saved_cost = Some(saved);
    }

    /// Restores the original costs; returns whether any dual infeasibility
    /// had to be repaired by bound flips.
    fn remove_perturbation(&mut self) -> bool {
        match self.saved_cost.take() {
            Some(c) => {
                self.cost = c;
                self.compute_duals();
                self.make_dual_feasible() > 0
            }
            None => false,
        }
    }

    fn reset_factor(&mut self) {
        if self.refactor(){
            self.compute_primal();
            self.compute_duals();
            self.make_dual_feasible();
        } else {
            self.compute_primal();
            self.compute_duals();
        }
    }

    pub fn solve(&mut self) -> LpResult {
        let (n, m) = (self.n, self.m);
        let limit = self.opts.max_iterations.unwrap_or(50_000 + 50 * (n + m));
        if self.head.len() != m {
            self.slack_basis();
        }
        self.reset_factor();
        self.make_dual_feasible();

        let mut iterations = 0;
        let mut bland = false;
        let mut stall = 0;
        let mut perturbed = false;
        let mut last_obj = f64::NEG_INFINITY;
        let mut certify_attempts = 0;
        loop {
            if iterations >= limit {
                return self.finish(LpStatus::IterationLimit, iterations, Some("iteration limit".into()));
            }
            if self.factor.as_ref().map_or(true, |f| f.etas.len() >= self.opts.refactor_every) {
                self.reset_factor();
            }
            let Some(p) = self.choose_leaving(bland) else {
                if self.saved_cost.is_some() {
                    self.remove_perturbation();
                    continue;
                }
                self.reset_factor();
                let pinf = self.head.iter().map(|&v| self.primal_infeasibility(v)).fold(0.0, f64::max);
                let dinf = (0..n + m).map(|j| self.dual_violation(j)).fold(0.0, f64::max);
                if pinf <= self.opts.feas_tol && dinf <= self.opts.dual_tol {
                    let unbounded =
                        (0..n + m).any(|j| self.on_artificial_bound(j) && self.d[j].abs() > self.opts.dual_tol);
                    let status = if unbounded { LpStatus::Unbounded } else { LpStatus::Optimal };
                    return self.finish(status, iterations, None);
                }
                certify_attempts += 1;
                if certify_attempts > 5 {
                    let msg = format!("could not certify: primal {pinf:.3e}, dual {dinf:.3e}");
                    return self.finish(LpStatus::IterationLimit, iterations, Some(msg));
                }
                self.make_dual_feasible();
                continue;
            };
            iterations += 1;
            let leave = self.head[p];
            let below = self.x[leave] < self.lo[leave];
            let sgn = if below { 1.0 } else { -1.0 };
            let delta = if below { self.lo[leave] - self.x[leave] } else { self.x[leave] - self.up[leave] };

            let mut e = vec![0.0; m];
            e[p] = 1.0;
            let rho = self.btran(e);
            let mut alpha = vec![0.0; n + m];
            for j in 0..n + m {
                if self.status[j] != VarStatus::Basic {
                    alpha[j] = self.dot_col(j, &rho);
                }
            }
            let (q, flips) = match self.ratio_test(&alpha, sgn, delta, bland) {
                Ratio::Enter { q, flips } => (q, flips),
                Ratio::Unbounded => {
                    if self.factor.as_ref().is_some_and(|f| !f.etas.is_empty()) {
                        self.reset_factor();
                        continue;
                    }
                    return self.finish(LpStatus::Infeasible, iterations, Some("dual ray found".into()));
                }
            };

            let mut colq = vec![0.0; m];
            self.scatter_col(q, 1.0, &mut colq);
            let aq = self.ftran(&colq);
            let piv = aq[p];
            if (piv - alpha[q]).abs() > 1e-7 * (1.0 + piv.abs()) || piv.abs() < self.opts.pivot_tol {
                if self.factor.as_ref().is_some_and(|f| !f.etas.is_empty()) {
                    self.reset_factor();
                    continue;
                }
                if piv.abs() < self.opts.pivot_tol {
                    let msg = format!("pivot {piv:.3e} too small after refactorization");
                    return self.finish(LpStatus::IterationLimit, iterations, Some(msg));
                }
            }

            // Dual step.
            let t = self.d[q] / alpha[q];
            for j in 0..n + m {
                if self.status[j] != VarStatus::Basic {
                    self.d[j] -= t * alpha[j];
                }
            }
            self.d[leave] = -t;
            self.d[q] = 0.0;

            // Bound flips.
            if !flips.is_empty() {
                let mut rhs = vec![0.0; m];
                for &j in &flips {
                    let old = self.x[j];
                    self.status[j] = match self.status[j] {
                        VarStatus::AtLower => VarStatus::AtUpper,
                        _ => VarStatus::AtLower,
                    };
                    let new = self.nonbasic_value(j);
                    self.x[j] = new;
                    self.scatter_col(j, -(new - old), &mut rhs);
                }
                let dx = self.ftran(&rhs);
                for (i, &v) in self.head.iter().enumerate() {
                    self.x[v] += dx[i];
                }
            }

            // Primal step.
            let target = if below { self.lo[leave] } else { self.up[leave] };
            let theta = (self.x[leave] - target) / piv;
            for (i, &v) in self.head.iter().enumerate() {
                self.x[v] -= theta * aq[i];
            }
            self.x[q] += theta;
            self.x[leave] = target;

            self.status[leave] = if below { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.status[q] = VarStatus::Basic;
            self.head[p] = q;
            self.pos[q] = p;
            self.pos[leave] = NONE;
            let zero = self.opts.zero_tol;
            let entries = aq.iter().enumerate().filter(|&(i, a)| i != p && a.abs() > zero).map(|(i, &a)| (i, a)).collect();
            self.factor.as_mut().expect("factorized").etas.push(Eta { pos: p, pivot: piv, entries });

            let obj = self.objective_min();
            if obj > last_obj + 1e-12 * (1.0 + obj.abs()) {
                last_obj = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= self.opts.stall_limit {
                    if perturbed {
                        bland = true;
                    } else {
                        perturbed = true;
                        self.perturb_costs();
                        last_obj = self.objective_min();
                        stall = 0;
                    }
                }
            }
        }
    }

    fn finish(&mut self, status: LpStatus, iterations: usize, diagnostic: Option<String>) -> LpResult {
        let n = self.n;
        if let Some(c) = self.saved_cost.take() {
            self.cost = c;
        }
        let y = if self.factor.is_some() { self.compute_duals() } else { vec![0.0; self.m] };
        let x: Vec<f64> = self.x[..n].to_vec();
        let row_activity: Vec<f64> =
            self.model.rows().iter().map(|row| row.coefs.iter().map(|&(j, a)| a * x[j]).sum()).collect();
        let max_dual_violation = (0..n + self.m).map(|j| self.dual_violation(j)).fold(0.0, f64::max);
        LpResult {
            status,
            objective: self.model.evaluate(&x),
            max_primal_violation: self.model.max_violation(&x),
            x,
            row_activity,
            row_duals: y.iter().map(|v| -v).collect(),
            iterations,
            basis: self.basis(),
            max_dual_violation,
            diagnostic,
        }
    }
}
