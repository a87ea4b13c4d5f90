//! Exact r-median: choose `r` columns minimizing `Σ_i w_i min_{k∈S} cost_ik`.
//!
//! Every separation problem in the solver reduces to this form. Small cases
//! can be enumerated; [`rmedian_solve`] is a best-bound branch-and-bound on
//! site in/out decisions with a Lagrangian lower bound (assignment rows
//! dualized, multipliers updated by subgradient steps) and a greedy plus
//! swap incumbent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RMedianError {
    #[error("enumeration of {count} subsets exceeds the cap of {cap}")]
    CapExceeded { count: u64, cap: u64 },
    #[error("invalid r-median instance: {0}")]
    Invalid(String),
}

pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RMedianInstance {
    m: usize,
    n: usize,
    cost: Vec<f64>,
    w: Vec<f64>,
    r: usize,
}

impl RMedianInstance {
    pub fn new(m: usize, n: usize, cost: Vec<f64>, w: Vec<f64>, r: usize) -> Result<Self, RMedianError> {
        if m == 0 || n == 0 {
            return Err(RMedianError::Invalid(format!("empty instance (m = {m}, n = {n})")));
        }
        if cost.len() != m * n || w.len() != m {
            return Err(RMedianError::Invalid("cost/weight dimensions do not match".into()));
        }
        if let Some(c) = cost.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(RMedianError::Invalid(format!("cost {c} is negative or not finite")));
        }
        if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(RMedianError::Invalid(format!("weight {x} is not positive")));
        }
        if r < 1 || r > n {
            return Err(RMedianError::Invalid(format!("r = {r} out of range 1..={n}")));
        }
        Ok(Self { m, n, cost, w, r })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    #[inline]
    pub fn cost(&self, i: usize, k: usize) -> f64 {
        self.cost[i * self.n + k]
    }

    pub fn cost_row(&self, i: usize) -> &[f64] {
        &self.cost[i * self.n..(i + 1) * self.n]
    }

    pub fn with_r(&self, r: usize) -> Result<Self, RMedianError> {
        Self::new(self.m, self.n, self.cost.clone(), self.w.clone(), r)
    }

    /// Objective of an arbitrary non-empty column set.
    pub fn evaluate(&self, sites: &[usize]) -> f64 {
        (0..self.m)
            .map(|i| {
                let row = self.cost_row(i);
                self.w[i] * sites.iter().map(|&k| row[k]).fold(f64::INFINITY, f64::min)
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RMedianStatus {
    Optimal,
    /// Node or time limit reached; `value` is the best found, `lower_bound` is valid.
    Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMedianSolution {
    /// Chosen columns, ascending.
    pub sites: Vec<usize>,
    pub value: f64,
    pub status: RMedianStatus,
    pub lower_bound: f64,
    pub root_bound: f64,
    pub nodes: usize,
    /// Filled when [`RMedianConfig::record_bounds`] is set.
    pub node_bounds: Vec<NodeBound>,
}

/// A node's lower bound together with the fixings that define its subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBound {
    pub bound: f64,
    pub fixed_in: Vec<usize>,
    pub fixed_out: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RMedianConfig {
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    pub root_subgradient_iters: usize,
    pub node_subgradient_iters: usize,
    /// Nodes whose bound is within this relative distance of the incumbent are
    /// still explored, so ties are resolved by set order.
    pub tie_tolerance: f64,
    pub record_bounds: bool,
}

impl Default for RMedianConfig {
    fn default() -> Self {
        Self {
            node_limit: 5_000_000,
            time_limit: None,
            root_subgradient_iters: 150,
            node_subgradient_iters: 25,
            tie_tolerance: 1e-10,
            record_bounds: false,
        }
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Brute force over all `C(n, r)` column sets in lexicographic order; the
/// first set attaining the minimum wins.
pub fn rmedian_enumerate(rm: &RMedianInstance, cap: u64) -> Result<RMedianSolution, RMedianError> {
    let count = binomial(rm.n, rm.r);
    if count > cap {
        return Err(RMedianError::CapExceeded { count, cap });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for set in (0..rm.n).combinations(rm.r) {
        let value = rm.evaluate(&set);
        if best.as_ref().map_or(true, |(_, b)| value < *b) {
            best = Some((set, value));
        }
    }
    let (sites, value) = best.expect("1 <= r <= n");
    Ok(RMedianSolution {
        sites,
        value,
        status: RMedianStatus::Optimal,
        lower_bound: value,
        root_bound: value,
        nodes: count as usize,
        node_bounds: Vec::new(),
    })
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    seq: usize,
    fixed_in: Vec<usize>,
    fixed_out: Vec<bool>,
    lambda: Vec<f64>,
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
    // Max-heap on "better": smaller bound first, then older node first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    sites: Vec<usize>,
    value: f64,
}

impl Incumbent {
    fn offer(&mut self, mut sites: Vec<usize>, value: f64) {
        sites.sort_unstable();
        if value < self.value || (value == self.value && sites < self.sites) {
            self.sites = sites;
            self.value = value;
        }
    }
}

struct Lagrangian {
    bound: f64,
    lambda: Vec<f64>,
    /// Columns picked by the relaxation at the best multipliers (fixed-in first).
    selection: Vec<usize>,
    /// Reduced column values at the best multipliers.
    rho: Vec<f64>,
}

struct Solver<'a> {
    rm: &'a RMedianInstance,
    cfg: &'a RMedianConfig,
    /// `w_i * cost_ik`, row-major.
    wc: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(rm: &'a RMedianInstance, cfg: &'a RMedianConfig) -> Self {
        let wc = (0..rm.m).flat_map(|i| rm.cost_row(i).iter().map(move |&c| rm.w[i] * c)).collect();
        Self { rm, cfg, wc }
    }

    fn trivial_bound(&self, fixed_out: &[bool]) -> (f64, Vec<f64>) {
        let n = self.rm.n;
        let lambda: Vec<f64> = (0..self.rm.m)
            .map(|i| {
                (0..n)
                    .filter(|&k| !fixed_out[k])
                    .map(|k| self.wc[i * n + k])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        (lambda.iter().sum(), lambda)
    }

    /// Evaluates `L(λ)` and fills `rho` and `selection`.
    fn lagrangian_value(
        &self,
        lambda: &[f64],
        fixed_in: &[usize],
        fixed_out: &[bool],
        rho: &mut [f64],
        selection: &mut Vec<usize>,
    ) -> f64 {
        let (m, n) = (self.rm.m, self.rm.n);
        rho.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m {
            let li = lambda[i];
            let row = &self.wc[i * n..(i + 1) * n];
            for k in 0..n {
                let d = row[k] - li;
                if d < 0.0 {
                    rho[k] += d;
                }
            }
        }
        selection.clear();
        selection.extend_from_slice(fixed_in);
        let need = self.rm.r - fixed_in.len();
        let mut free: Vec<usize> = (0..n).filter(|&k| !fixed_out[k] && !fixed_in.contains(&k)).collect();
        free.sort_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(a.cmp(&b)));
        selection.extend_from_slice(&free[..need]);
        lambda.iter().sum::<f64>() + selection.iter().map(|&k| rho[k]).sum::<f64>()
    }

    fn lagrangian(
        &self,
        fixed_in: &[usize],
        fixed_out: &[bool],
        warm: Option<&[f64]>,
        upper: f64,
        iters: usize,
    ) -> Lagrangian {
        let (m, n) = (self.rm.m, self.rm.n);
        let (trivial, init) = self.trivial_bound(fixed_out);
        let mut lambda = warm.map_or(init, <[f64]>::to_vec);
        let mut rho = vec![0.0; n];
        let mut sel = Vec::with_capacity(self.rm.r);
        let mut best = Lagrangian { bound: f64::NEG_INFINITY, lambda: lambda.clone(), selection: vec![], rho: vec![] };
        let mut theta = 2.0;
        let mut stale = 0;
        for _ in 0..iters.max(1) {
            let value = self.lagrangian_value(&lambda, fixed_in, fixed_out, &mut rho, &mut sel);
            if value > best.bound {
                best.bound = value;
                best.lambda.clone_from(&lambda);
                best.selection.clone_from(&sel);
                best.rho.clone_from(&rho);
                stale = 0;
            } else {
                stale += 1;
                if stale >= 5 {
                    theta *= 0.5;
                    stale = 0;
                }
            }
            if value >= upper || theta < 1e-4 {
                break;
            }
            // Subgradient of the dualized assignment rows.
            let mut g = vec![1.0; m];
            for &k in &sel {
                for i in 0..m {
                    if self.wc[i * n + k] < lambda[i] {
                        g[i] -= 1.0;
                    }
                }
            }
            let norm: f64 = g.iter().map(|x| x * x).sum();
            if norm == 0.0 {
                break;
            }
            let target = if upper.is_finite() { upper } else { value.abs() * 1.1 + 1.0 };
            let step = theta * (target - value).max(1e-12 * (1.0 + value.abs())) / norm;
            for (l, gi) in lambda.iter_mut().zip(&g) {
                *l += step * gi;
            }
        }
        if trivial > best.bound {
            let mut rho = vec![0.0; n];
            let (_, init) = self.trivial_bound(fixed_out);
            let mut sel = Vec::new();
            let value = self.lagrangian_value(&init, fixed_in, fixed_out, &mut rho, &mut sel);
            best = Lagrangian { bound: value.max(trivial), lambda: init, selection: sel, rho };
        }
        best
    }

    fn greedy_swap(&self) -> (Vec<usize>, f64) {
        let (m, n, r) = (self.rm.m, self.rm.n, self.rm.r);
        let mut cur = vec![f64::INFINITY; m];
        let mut chosen: Vec<usize> = Vec::with_capacity(r);
        for _ in 0..r {
            let mut best: Option<(usize, f64)> = None;
            for k in (0..n).filter(|k| !chosen.contains(k)) {
                let total: f64 = (0..m).map(|i| cur[i].min(self.wc[i * n + k])).sum();
                if best.map_or(true, |(_, b)| total < b) {
                    best = Some((k, total));
                }
            }
            let (k, _) = best.expect("r <= n");
            chosen.push(k);
            for i in 0..m {
                cur[i] = cur[i].min(self.wc[i * n + k]);
            }
        }
        let eval = |set: &[usize]| -> f64 {
            (0..m).map(|i| set.iter().map(|&k| self.wc[i * n + k]).fold(f64::INFINITY, f64::min)).sum()
        };
        let mut value = eval(&chosen);
        let mut improved = true;
        let mut passes = 0;
        while improved && passes < 50 {
            improved = false;
            passes += 1;
            'outer: for pos in 0..r {
                for k in 0..n {
                    if chosen.contains(&k) {
                        continue;
                    }
                    let old = chosen[pos];
                    chosen[pos] = k;
                    let cand = eval(&chosen);
                    if cand < value - 1e-12 * value.abs().max(1.0) {
                        value = cand;
                        improved = true;
                        continue 'outer;
                    }
                    chosen[pos] = old;
                }
            }
        }
        chosen.sort_unstable();
        let value = self.rm.evaluate(&chosen);
        (chosen, value)
    }

    fn solve(&self) -> RMedianSolution {
        let rm = self.rm;
        let (n, r) = (rm.n, rm.r);
        let start = Instant::now();
        if r == n {
            let sites: Vec<usize> = (0..n).collect();
            let value = rm.evaluate(&sites);
            return RMedianSolution {
                sites,
                value,
                status: RMedianStatus::Optimal,
                lower_bound: value,
                root_bound: value,
                nodes: 1,
                node_bounds: Vec::new(),
            };
        }

        let (gs, gv) = self.greedy_swap();
        let mut inc = Incumbent { sites: gs, value: gv };
        let mut node_bounds = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut seq = 0usize;
        let mut nodes = 0usize;

        let root_out = vec![false; n];
        let root = self.lagrangian(&[], &root_out, None, inc.value, self.cfg.root_subgradient_iters);
        let root_bound = root.bound;
        self.process(Vec::new(), root_out, root, &mut inc, &mut heap, &mut seq, &mut node_bounds);

        let mut status = RMedianStatus::Optimal;
        while let Some(node) = heap.pop() {
            if node.bound > self.prune_level(inc.value) {
                continue;
            }
            nodes += 1;
            if nodes > self.cfg.node_limit || self.cfg.time_limit.is_some_and(|t| start.elapsed() > t) {
                heap.push(node);
                status = RMedianStatus::Limit;
                break;
            }
            self.branch(node, &mut inc, &mut heap, &mut seq, &mut node_bounds);
        }

        let lower_bound = match status {
            RMedianStatus::Optimal => inc.value,
            RMedianStatus::Limit => heap.iter().map(|nd| nd.bound).fold(inc.value, f64::min),
        };
        RMedianSolution {
            sites: inc.sites,
            value: inc.value,
            status,
            lower_bound,
            root_bound: root_bound.min(inc.value),
            nodes: nodes + 1,
            node_bounds,
        }
    }

    fn prune_level(&self, incumbent: f64) -> f64 {
        incumbent + self.cfg.tie_tolerance * incumbent.abs().max(1.0)
    }

    /// Records a freshly bounded node: evaluates its Lagrangian selection as a
    /// primal candidate and queues it unless it is a leaf or pruned.
    #[allow(clippy::too_many_arguments)]
    fn process(
        &self,
        fixed_in: Vec<usize>,
        fixed_out: Vec<bool>,
        lag: Lagrangian,
        inc: &mut Incumbent,
        heap: &mut BinaryHeap<Node>,
        seq: &mut usize,
        node_bounds: &mut Vec<NodeBound>,
    ) {
        if self.cfg.record_bounds {
            node_bounds.push(NodeBound {
                bound: lag.bound,
                fixed_in: fixed_in.clone(),
                fixed_out: (0..self.rm.n).filter(|&k| fixed_out[k]).collect(),
            });
        }
        if !lag.selection.is_empty() {
            let value = self.rm.evaluate(&lag.selection);
            inc.offer(lag.selection.clone(), value);
        }
        if lag.bound > self.prune_level(inc.value) {
            return;
        }
        *seq += 1;
        heap.push(Node { bound: lag.bound, seq: *seq, fixed_in, fixed_out, lambda: lag.lambda });
    }

    fn branch(
        &self,
        node: Node,
        inc: &mut Incumbent,
        heap: &mut BinaryHeap<Node>,
        seq: &mut usize,
        node_bounds: &mut Vec<NodeBound>,
    ) {
        let (n, r) = (self.rm.n, self.rm.r);
        // Recompute the selection at the stored multipliers to pick the branching column.
        let mut rho = vec![0.0; n];
        let mut sel = Vec::new();
        self.lagrangian_value(&node.lambda, &node.fixed_in, &node.fixed_out, &mut rho, &mut sel);
        let free_sel = sel.iter().copied().filter(|k| !node.fixed_in.contains(k));
        let Some(k) = free_sel.min_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(a.cmp(&b))) else {
            return;
        };

        let mut with_k = node.fixed_in.clone();
        with_k.push(k);
        with_k.sort_unstable();
        let mut without_k = node.fixed_out.clone();
        without_k[k] = true;

        for (fixed_in, fixed_out) in [(with_k, node.fixed_out.clone()), (node.fixed_in.clone(), without_k)] {
            let free = (0..n).filter(|&j| !fixed_out[j] && !fixed_in.contains(&j)).count();
            if fixed_in.len() + free < r {
                continue;
            }
            if fixed_in.len() == r || fixed_in.len() + free == r {
                let mut sites = fixed_in.clone();
                if sites.len() < r {
                    sites.extend((0..n).filter(|&j| !fixed_out[j] && !fixed_in.contains(&j)));
                }
                let value = self.rm.evaluate(&sites);
                if self.cfg.record_bounds {
                    node_bounds.push(NodeBound {
                        bound: value,
                        fixed_in: fixed_in.clone(),
                        fixed_out: (0..n).filter(|&j| fixed_out[j]).collect(),
                    });
                }
                inc.offer(sites, value);
                continue;
            }
            let lag = self.lagrangian(
                &fixed_in,
                &fixed_out,
                Some(&node.lambda),
                inc.value,
                self.cfg.node_subgradient_iters,
            );
            self.process(fixed_in, fixed_out, lag, inc, heap, seq, node_bounds);
        }
    }
}

/// Exact r-median by branch-and-bound. Returns `status = Optimal` whenever it
/// runs to completion; ties resolve to the lexicographically smallest set.
pub fn rmedian_solve(rm: &RMedianInstance, cfg: &RMedianConfig) -> RMedianSolution {
    Solver::new(rm, cfg).solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rm(rng: &mut ChaCha8Rng, m: usize, n: usize, r: usize) -> RMedianInstance {
        let cost = (0..m * n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let w = (0..m).map(|_| f64::from(rng.gen_range(1u32..=10))).collect();
        RMedianInstance::new(m, n, cost, w, r).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(1000, 500), u64::MAX);
    }

    #[test]
    fn hand_enumerated_tie() {
        let rm = RMedianInstance::new(2, 3, vec![1., 2., 3., 3., 2., 1.], vec![1., 1.], 1).unwrap();
        let e = rmedian_enumerate(&rm, 100).unwrap();
        assert_eq!(e.sites, vec![0]);
        assert_eq!(e.value, 4.0);
        let s = rmedian_solve(&rm, &RMedianConfig::default());
        assert_eq!(s.sites, vec![0]);
        assert_eq!(s.value, 4.0);
    }

    #[test]
    fn full_selection_when_r_equals_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rm = random_rm(&mut rng, 5, 4, 4);
        let s = rmedian_solve(&rm, &RMedianConfig::default());
        assert_eq!(s.sites, vec![0, 1, 2, 3]);
        let expect: f64 = (0..5).map(|i| rm.weights()[i] * rm.cost_row(i).iter().copied().fold(f64::INFINITY, f64::min)).sum();
        assert_eq!(s.value, expect);
    }

    #[test]
    fn zero_column_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut cost: Vec<f64> = (0..6 * 7).map(|_| rng.gen_range(0.1..1.0)).collect();
        for i in 0..6 {
            cost[i * 7 + 4] = 0.0;
        }
        let rm = RMedianInstance::new(6, 7, cost, vec![1.0; 6], 2).unwrap();
        let s = rmedian_solve(&rm, &RMedianConfig::default());
        assert_eq!(s.value, 0.0);
        assert!(s.sites.contains(&4));
    }

    #[test]
    fn equal_rows_pick_first_set() {
        let rm = RMedianInstance::new(3, 5, vec![0.5; 15], vec![1.0, 2.0, 3.0], 2).unwrap();
        let e = rmedian_enumerate(&rm, 100).unwrap();
        let s = rmedian_solve(&rm, &RMedianConfig::default());
        assert_eq!(e.sites, vec![0, 1]);
        assert_eq!(s.sites, vec![0, 1]);
        assert_eq!(s.value, 3.0);
    }

    #[test]
    fn cap_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rm = random_rm(&mut rng, 3, 20, 10);
        assert!(matches!(rmedian_enumerate(&rm, 1000), Err(RMedianError::CapExceeded { .. })));
    }

    #[test]
    fn invalid_instances() {
        assert!(RMedianInstance::new(1, 2, vec![-1.0, 1.0], vec![1.0], 1).is_err());
        assert!(RMedianInstance::new(1, 2, vec![1.0, 1.0], vec![0.0], 1).is_err());
        assert!(RMedianInstance::new(1, 2, vec![1.0, 1.0], vec![1.0], 3).is_err());
    }

    #[test]
    fn matches_enumeration_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=15);
            let r = rng.gen_range(1..=n);
            let rm = random_rm(&mut rng, m, n, r);
            let e = rmedian_enumerate(&rm, DEFAULT_ENUMERATION_CAP).unwrap();
            let s = rmedian_solve(&rm, &RMedianConfig::default());
            assert_eq!(s.status, RMedianStatus::Optimal);
            assert_eq!(s.value, e.value, "m={m} n={n} r={r}");
            assert_eq!(s.sites, e.sites);
            assert!(s.root_bound <= e.value + 1e-12);
        }
    }

    #[test]
    fn node_bounds_are_valid_for_their_subproblems() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = RMedianConfig { record_bounds: true, root_subgradient_iters: 5, ..Default::default() };
        for _ in 0..40 {
            let n = rng.gen_range(4..=10);
            let r = rng.gen_range(1..n);
            let rm = random_rm(&mut rng, 8, n, r);
            let s = rmedian_solve(&rm, &cfg);
            for nb in &s.node_bounds {
                let best = (0..n)
                    .combinations(r)
                    .filter(|set| nb.fixed_in.iter().all(|k| set.contains(k)))
                    .filter(|set| nb.fixed_out.iter().all(|k| !set.contains(k)))
                    .map(|set| rm.evaluate(&set))
                    .fold(f64::INFINITY, f64::min);
                assert!(nb.bound <= best + 1e-9, "bound {} > subproblem optimum {best}", nb.bound);
            }
        }
    }

    #[test]
    fn value_is_monotone_in_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let rm = random_rm(&mut rng, 10, 9, 1);
            let mut last = f64::INFINITY;
            for r in 1..=9 {
                let v = rmedian_solve(&rm.with_r(r).unwrap(), &RMedianConfig::default()).value;
                assert!(v <= last + 1e-12);
                last = v;
            }
        }
    }

    #[test]
    fn node_limit_reports_valid_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rm = random_rm(&mut rng, 30, 25, 5);
        let cfg = RMedianConfig { node_limit: 1, root_subgradient_iters: 3, ..Default::default() };
        let s = rmedian_solve(&rm, &cfg);
        let exact = rmedian_solve(&rm, &RMedianConfig::default());
        assert!(s.lower_bound <= exact.value + 1e-9);
        assert!(s.value >= exact.value);
    }
}
