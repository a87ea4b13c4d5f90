//! LP-based branch-and-cut for the SF, GSF and EF formulations.
//!
//! Column layout: `x_0..x_{n-1}`, then `η`, then (EF only) `z_ij` at
//! `n + 1 + i·n + j`. The objective is `max η`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cuts::{Cut, CutKey, CutKind};
use crate::instance::{BinaryChoice, Instance};
use crate::lp::{Basis, LpModel, LpSolver, LpStatus};
use crate::market::{follower_best_response, ResponseMode};
use crate::separation::{round_top_p, RelaxPoint, SeparationOutcome, Separator, EPS_VIOL, INT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Formulation {
    #[serde(rename = "SF")]
    Sf,
    #[serde(rename = "GSF")]
    Gsf,
    #[serde(rename = "EF")]
    Ef,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Sf, Formulation::Gsf, Formulation::Ef];
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Sf => "SF",
            Formulation::Gsf => "GSF",
            Formulation::Ef => "EF",
        })
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SF" => Ok(Formulation::Sf),
            "GSF" => Ok(Formulation::Gsf),
            "EF" => Ok(Formulation::Ef),
            _ => Err(format!("unknown formulation '{s}' (expected SF, GSF or EF)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BncConfig {
    pub formulation: Formulation,
    pub time_limit: Duration,
    /// Relative gap `(UB − LB)/UB` at which the search stops.
    pub gap_tol: f64,
    pub seed: u64,
    pub node_round_cap: usize,
    pub root_round_cap: usize,
    pub node_limit: Option<usize>,
    pub record_events: bool,
    /// Keep a copy of every cut added to the LP in the report.
    pub record_cuts: bool,
}

impl BncConfig {
    pub fn new(formulation: Formulation) -> Self {
        Self {
            formulation,
            time_limit: Duration::from_secs(7200),
            gap_tol: 0.0,
            seed: 0,
            node_round_cap: 50,
            root_round_cap: 1000,
            node_limit: None,
            record_events: false,
            record_cuts: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    /// The LP engine failed to certify a relaxation.
    Numerical,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Root,
    Node,
    Incumbent,
    Finish,
}

/// One line of the JSON event log.
#[derive(Debug, Clone, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub node: usize,
    pub depth: usize,
    pub bound: f64,
    pub lower: f64,
    pub upper: f64,
    pub cuts: usize,
    pub open: usize,
    pub time_s: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub formulation: Formulation,
    pub status: SolveStatus,
    pub incumbent: Option<BinaryChoice>,
    pub follower: Option<BinaryChoice>,
    /// Best leader share found (`O`, the lower bound).
    pub objective: f64,
    pub upper_bound: f64,
    /// `(UB − LB)/UB`.
    pub gap: f64,
    /// Explored nodes, root excluded.
    pub nodes: usize,
    pub cuts: usize,
    pub lp_iterations: usize,
    pub separation_time: Duration,
    pub total_time: Duration,
    pub root_bound: f64,
    pub pool_size: usize,
    pub events: Vec<Event>,
    /// Cuts added to the LP, when [`BncConfig::record_cuts`] is set.
    pub cut_log: Vec<Cut>,
    /// Set when the run stopped on a numerical failure.
    pub diagnostic: Option<String>,
}

impl SolveReport {
    /// `(O_root − O*)/O* · 100`, using this run's objective as `O*`; `None`
    /// unless the run proved optimality.
    pub fn root_gap_pct(&self) -> Option<f64> {
        (self.status == SolveStatus::Optimal).then(|| root_gap_pct(self.root_bound, self.objective))
    }

    pub fn gap_pct(&self) -> f64 {
        self.gap * 100.0
    }

    pub fn csv_row(&self, instance: &str) -> String {
        let rg = self.root_gap_pct().map_or(String::new(), |v| format!("{v:.4}"));
        format!(
            "{},{},{:.6},{:.3},{},{},{:.3},{},{}",
            instance,
            self.formulation,
            self.objective,
            self.total_time.as_secs_f64(),
            self.nodes,
            self.cuts,
            self.separation_time.as_secs_f64(),
            rg,
            self.status.as_str()
        )
    }
}

pub const CSV_HEADER: &str = "instance,formulation,objective,time_s,nodes,cuts,sep_time_s,root_gap_pct,status";

/// `(O_root − O*)/O* · 100`.
pub fn root_gap_pct(root_bound: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        0.0
    } else {
        (root_bound - optimum) / optimum * 100.0
    }
}

/// The relaxation of one formulation before any cut: `Σx = p`, `0 ≤ x ≤ 1`,
/// `η ≤ Σ_i w_i`, and for EF the `z` columns with their linking rows.
pub fn base_model(inst: &Instance, formulation: Formulation) -> LpModel {
    let (m, n) = (inst.m(), inst.n());
    let ncols = if formulation == Formulation::Ef { n + 1 + m * n } else { n + 1 };
    let mut model = LpModel::new(ncols);
    for j in 0..n {
        model.set_bounds(j, 0.0, 1.0);
        model.set_name(j, format!("x{}", j + 1));
    }
    model.set_bounds(n, f64::NEG_INFINITY, inst.total_weight());
    model.set_name(n, "eta");
    model.set_objective(n, 1.0);
    model.add_eq(&(0..n).map(|j| (j, 1.0)).collect::<Vec<_>>(), inst.p() as f64);
    if formulation == Formulation::Ef {
        for i in 0..m {
            for j in 0..n {
                let col = z_col(n, i, j);
                model.set_bounds(col, 0.0, 1.0);
                model.set_name(col, format!("z{}_{}", i + 1, j + 1));
                model.add_le(&[(col, 1.0), (j, -1.0)], 0.0);
            }
            model.add_le(&(0..n).map(|j| (z_col(n, i, j), 1.0)).collect::<Vec<_>>(), 1.0);
        }
    }
    model
}

pub fn z_col(n: usize, i: usize, j: usize) -> usize {
    n + 1 + i * n + j
}

/// Row `η − (coefficients) ≤ constant` for a cut.
pub fn cut_row(cut: &Cut, n: usize) -> (Vec<(usize, f64)>, f64) {
    let mut coefs = vec![(n, 1.0)];
    coefs.extend(cut.xcoef.iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(j, &a)| (j, -a)));
    coefs.extend(cut.zcoef.iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(k, &a)| (n + 1 + k, -a)));
    (coefs, cut.constant)
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    seq: usize,
    depth: usize,
    fix: Vec<i8>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(other.seq.cmp(&self.seq))
    }
}

enum NodeOutcome {
    Pruned,
    Integral,
    Branch { bound: f64, x: Vec<f64>, basis: Basis },
    Failed(String),
}

struct Search<'a> {
    inst: &'a Instance,
    cfg: &'a BncConfig,
    lp: LpSolver,
    sep: Separator<'a>,
    keys: HashSet<CutKey>,
    heuristic_cache: HashMap<Vec<usize>, f64>,
    incumbent: Option<(BinaryChoice, BinaryChoice, f64)>,
    cuts: usize,
    lp_iterations: usize,
    sep_time: Duration,
    start: Instant,
    events: Vec<Event>,
    cut_log: Vec<Cut>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cfg: &'a BncConfig) -> Self {
        Self {
            inst,
            cfg,
            lp: LpSolver::new(base_model(inst, cfg.formulation)),
            sep: Separator::new(inst),
            keys: HashSet::new(),
            heuristic_cache: HashMap::new(),
            incumbent: None,
            cuts: 0,
            lp_iterations: 0,
            sep_time: Duration::ZERO,
            start: Instant::now(),
            events: Vec::new(),
            cut_log: Vec::new(),
        }
    }

    fn lower(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |inc| inc.2)
    }

    fn prune_tol(&self) -> f64 {
        let lb = self.lower().abs();
        (self.cfg.gap_tol * lb).max(1e-9 * lb.max(1.0))
    }

    fn timed_out(&self) -> bool {
        self.start.elapsed() >= self.cfg.time_limit
    }

    fn event(&mut self, kind: EventKind, node: usize, depth: usize, bound: f64, upper: f64, open: usize) {
        if self.cfg.record_events {
            self.events.push(Event {
                kind,
                node,
                depth,
                bound,
                lower: self.lower(),
                upper,
                cuts: self.cuts,
                open,
                time_s: self.start.elapsed().as_secs_f64(),
            });
        }
    }

    /// Evaluates a leader choice exactly and keeps it if it improves the incumbent.
    fn offer(&mut self, x: BinaryChoice) -> bool {
        let key = x.sites();
        if self.heuristic_cache.contains_key(&key) {
            return false;
        }
        let (y, value) = follower_best_response(self.inst, &x, ResponseMode::RMedian).expect("leader choice has p sites");
        self.heuristic_cache.insert(key, value);
        self.sep.pool.insert(self.inst, y.clone());
        if value > self.lower() + 1e-12 {
            self.incumbent = Some((x, y, value));
            return true;
        }
        false
    }

    fn separate(&mut self, pt: &RelaxPoint) -> SeparationOutcome {
        let t = Instant::now();
        let out = match self.cfg.formulation {
            Formulation::Sf => self.sep.sf(pt),
            Formulation::Gsf => self.sep.gsf(pt),
            Formulation::Ef => self.sep.ef(pt),
        };
        self.sep_time += t.elapsed();
        out
    }

    fn add_cuts(&mut self, cuts: Vec<Cut>) -> usize {
        let n = self.inst.n();
        let mut added = 0;
        for cut in cuts {
            if !self.keys.insert(cut.key()) {
                continue;
            }
            let (coefs, rhs) = cut_row(&cut, n);
            self.lp.add_row(&coefs, f64::NEG_INFINITY, rhs);
            if self.cfg.record_cuts {
                self.cut_log.push(cut);
            }
            added += 1;
        }
        self.cuts += added;
        added
    }

    fn apply_fixings(&mut self, fix: &[i8]) {
        for (j, &f) in fix.iter().enumerate() {
            match f {
                0 => self.lp.set_bounds(j, 0.0, 0.0),
                1 => self.lp.set_bounds(j, 1.0, 1.0),
                _ => self.lp.set_bounds(j, 0.0, 1.0),
            }
        }
    }

    fn point(&self, x: &[f64]) -> RelaxPoint {
        let n = self.inst.n();
        let eta = x[n];
        let xs: Vec<f64> = x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
        if self.cfg.formulation == Formulation::Ef {
            let z = x[n + 1..].iter().map(|v| v.clamp(0.0, 1.0)).collect();
            RelaxPoint::with_z(eta, xs, z)
        } else {
            RelaxPoint::new(eta, xs)
        }
    }

    /// Cut loop at one node.
    fn process(&mut self, fix: &[i8], basis: Option<&Basis>, round_cap: usize, prune: bool) -> NodeOutcome {
        self.apply_fixings(fix);
        if let Some(b) = basis {
            self.lp.set_basis(b);
        }
        let mut rounds = 0;
        loop {
            let mut res = self.lp.solve();
            self.lp_iterations += res.iterations;
            if res.status == LpStatus::IterationLimit {
                self.lp.slack_basis();
                res = self.lp.solve();
                self.lp_iterations += res.iterations;
            }
            match res.status {
                LpStatus::Infeasible => return NodeOutcome::Pruned,
                LpStatus::Optimal => {}
                other => return NodeOutcome::Failed(format!("LP {other:?}: {:?}", res.diagnostic)),
            }
            let bound = res.objective;
            if prune && bound <= self.lower() + self.prune_tol() {
                return NodeOutcome::Pruned;
            }
            let pt = self.point(&res.x);
            let integral = pt.is_integral();
            self.offer(if integral {
                BinaryChoice::from_sites(self.inst.n(), &pt.rounded_sites())
            } else {
                round_top_p(&pt.x, self.inst.p())
            });
            let out = self.separate(&pt);
            let certified = out.certified;
            let found = !out.cuts.is_empty();
            let added = self.add_cuts(out.cuts);
            if integral {
                if certified || (!found && pt.eta <= self.lower() + EPS_VIOL) {
                    return NodeOutcome::Integral;
                }
                if added == 0 {
                    if found && self.timed_out() {
                        return NodeOutcome::Integral;
                    }
                    // Violated but already present: the LP lags behind its rows.
                    self.lp.slack_basis();
                    if rounds > round_cap.max(50) {
                        return NodeOutcome::Failed("cut loop stalled at an integral point".into());
                    }
                }
                rounds += 1;
                continue;
            }
            if added == 0 || rounds >= round_cap || self.timed_out() {
                return NodeOutcome::Branch { bound, x: pt.x, basis: res.basis };
            }
            rounds += 1;
        }
    }

    fn run(&mut self) -> SolveReport {
        let n = self.inst.n();
        let mut status = SolveStatus::Optimal;
        let mut diagnostic = None;
        let mut heap = BinaryHeap::new();
        let mut seq = 0usize;
        let mut nodes = 0usize;

        let root = self.process(&vec![-1; n], None, self.cfg.root_round_cap, false);
        let root_bound = match &root {
            NodeOutcome::Branch { bound, .. } => *bound,
            _ => self.lower(),
        };
        self.event(EventKind::Root, 0, 0, root_bound, root_bound, 0);
        match root {
            NodeOutcome::Branch { bound, x, basis } => {
                self.push_children(&mut heap, &mut seq, &vec![-1; n], 0, bound, &x, basis);
            }
            NodeOutcome::Failed(msg) => {
                status = SolveStatus::Numerical;
                diagnostic = Some(msg);
            }
            _ => {}
        }

        while let Some(node) = heap.pop() {
            let upper = node.bound.max(self.lower());
            if node.bound <= self.lower() + self.prune_tol() {
                continue;
            }
            if self.gap(upper) <= self.cfg.gap_tol && self.incumbent.is_some() && self.cfg.gap_tol > 0.0 {
                heap.push(node);
                break;
            }
            if self.timed_out() {
                status = SolveStatus::TimeLimit;
                heap.push(node);
                break;
            }
            if self.cfg.node_limit.is_some_and(|lim| nodes >= lim) {
                status = SolveStatus::NodeLimit;
                heap.push(node);
                break;
            }
            nodes += 1;
            let before = self.lower();
            let out = self.process(&node.fix, node.basis.as_ref(), self.cfg.node_round_cap, true);
            match out {
                NodeOutcome::Branch { bound, x, basis } => {
                    let bound = bound.min(node.bound);
                    self.event(EventKind::Node, nodes, node.depth, bound, upper, heap.len());
                    self.push_children(&mut heap, &mut seq, &node.fix, node.depth, bound, &x, basis);
                }
                NodeOutcome::Failed(msg) => {
                    status = SolveStatus::Numerical;
                    diagnostic = Some(msg);
                    break;
                }
                NodeOutcome::Pruned | NodeOutcome::Integral => {
                    self.event(EventKind::Node, nodes, node.depth, node.bound, upper, heap.len());
                }
            }
            if self.lower() > before {
                self.event(EventKind::Incumbent, nodes, node.depth, self.lower(), upper, heap.len());
            }
        }
        let open_bound = heap.iter().map(|nd| nd.bound).fold(f64::NEG_INFINITY, f64::max);
        let upper = match status {
            SolveStatus::Numerical => self.inst.total_weight(),
            _ => open_bound.max(self.lower()),
        };
        let lower = self.lower();
        let gap = self.gap(upper);
        self.event(EventKind::Finish, nodes, 0, upper, upper, heap.len());
        let (incumbent, follower) = match self.incumbent.clone() {
            Some((x, y, _)) => (Some(x), Some(y)),
            None => (None, None),
        };
        SolveReport {
            formulation: self.cfg.formulation,
            status,
            incumbent,
            follower,
            objective: lower.max(0.0),
            upper_bound: upper,
            gap,
            nodes,
            cuts: self.cuts,
            lp_iterations: self.lp_iterations,
            separation_time: self.sep_time,
            total_time: self.start.elapsed(),
            root_bound,
            pool_size: self.sep.pool.len(),
            events: std::mem::take(&mut self.events),
            cut_log: std::mem::take(&mut self.cut_log),
            diagnostic,
        }
    }

    fn gap(&self, upper: f64) -> f64 {
        let lower = self.lower();
        if !lower.is_finite() {
            return 1.0;
        }
        if upper <= 0.0 {
            return 0.0;
        }
        ((upper - lower) / upper).max(0.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn push_children(
        &self,
        heap: &mut BinaryHeap<Node>,
        seq: &mut usize,
        fix: &[i8],
        depth: usize,
        bound: f64,
        x: &[f64],
        basis: Basis,
    ) {
        let (n, p) = (self.inst.n(), self.inst.p());
        let j = (0..n)
            .filter(|&j| fix[j] < 0 && x[j] > INT_TOL && x[j] < 1.0 - INT_TOL)
            .min_by(|&a, &b| (x[a] - 0.5).abs().total_cmp(&(x[b] - 0.5).abs()).then(a.cmp(&b)));
        let Some(j) = j else { return };
        let ones = fix.iter().filter(|&&f| f == 1).count();
        let zeros = fix.iter().filter(|&&f| f == 0).count();
        for value in [1i8, 0] {
            if (value == 1 && ones + 1 > p) || (value == 0 && zeros + 1 > n - p) {
                continue;
            }
            let mut child = fix.to_vec();
            child[j] = value;
            heap.push(Node { bound, seq: *seq, depth: depth + 1, fix: child, basis: Some(basis.clone()) });
            *seq += 1;
        }
    }
}

/// Solves the bilevel problem with the configured formulation.
pub fn solve(inst: &Instance, cfg: &BncConfig) -> SolveReport {
    Search::new(inst, cfg).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMode {
    /// The separation loop used by [`solve`].
    Separation,
    /// Every cut of the family for every follower choice (small instances).
    FullEnumeration,
}

#[derive(Debug, Clone)]
pub struct RootReport {
    pub bound: f64,
    pub optimum: f64,
    pub root_gap_pct: f64,
    pub cuts: usize,
}

/// Root bound and its gap to `optimum` (computed by [`solve`] if absent).
pub fn root_relaxation(
    inst: &Instance,
    cfg: &BncConfig,
    mode: RootMode,
    optimum: Option<f64>,
) -> Result<RootReport, crate::oracle::OracleError> {
    let (bound, cuts) = match mode {
        RootMode::Separation => {
            let mut search = Search::new(inst, cfg);
            let n = inst.n();
            let bound = match search.process(&vec![-1; n], None, cfg.root_round_cap, false) {
                NodeOutcome::Branch { bound, .. } => bound,
                _ => search.lower(),
            };
            (bound, search.cuts)
        }
        RootMode::FullEnumeration => {
            let full = crate::oracle::full_lp(inst, cfg.formulation, &crate::oracle::OracleCaps::default())?;
            (full.value, full.rows)
        }
    };
    let optimum = optimum.unwrap_or_else(|| solve(inst, cfg).objective);
    Ok(RootReport { bound, optimum, root_gap_pct: root_gap_pct(bound, optimum), cuts })
}

/// Kind of cut each formulation generates.
pub fn cut_kind(formulation: Formulation) -> CutKind {
    match formulation {
        Formulation::Sf => CutKind::Sf,
        Formulation::Gsf => CutKind::Gsf,
        Formulation::Ef => CutKind::Ef,
    }
}
