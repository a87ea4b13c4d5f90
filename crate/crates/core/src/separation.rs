//! Separation oracles for the SF, GSF and EF cut families.
//!
//! Each oracle first scans the follower pool (SF, GSF) and falls back to an
//! exact r-median solve. An empty result from the exact path certifies that
//! the point satisfies every cut of the family.

use std::collections::HashSet;

use crate::cuts::{
    ef_cut_with, ef_separation_costs, gsf_separation_costs, improved_cut_with, submodular_cut_with, tight_ell, Cut,
    SiteOrder,
};
use crate::instance::{BinaryChoice, Instance};
use crate::market::{compute_cy, response_costs, CyMatrix};
use crate::rmedian::{
    rmedian_enumerate, rmedian_solve, RMedianConfig, RMedianInstance, RMedianSolution, RMedianStatus,
    DEFAULT_ENUMERATION_CAP,
};

/// Absolute violation a cut must exceed to be reported.
pub const EPS_VIOL: f64 = 1e-6;
/// Distance from 0 or 1 below which an LP value counts as integral.
pub const INT_TOL: f64 = 1e-6;

/// Follower choices returned by earlier exact separations.
#[derive(Debug, Clone, Default)]
pub struct FollowerPool {
    members: Vec<(BinaryChoice, CyMatrix)>,
    seen: HashSet<Vec<usize>>,
}

impl FollowerPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `y` unless already present; returns whether it was new.
    pub fn insert(&mut self, inst: &Instance, y: BinaryChoice) -> bool {
        let key = y.sites();
        if self.seen.contains(&key) {
            return false;
        }
        let cy = compute_cy(inst, &y).expect("pool members have r >= 1 open sites");
        self.seen.insert(key);
        self.members.push((y, cy));
        true
    }

    pub fn contains(&self, y: &BinaryChoice) -> bool {
        self.seen.contains(&y.sites())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Most recently added first.
    pub fn iter(&self) -> impl Iterator<Item = (&BinaryChoice, &CyMatrix)> {
        self.members.iter().rev().map(|(y, cy)| (y, cy))
    }
}

/// An LP point `(η*, x*)` or `(η*, x*, z*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxPoint {
    pub eta: f64,
    pub x: Vec<f64>,
    pub z: Option<Vec<f64>>,
}

impl RelaxPoint {
    pub fn new(eta: f64, x: Vec<f64>) -> Self {
        Self { eta, x, z: None }
    }

    pub fn with_z(eta: f64, x: Vec<f64>, z: Vec<f64>) -> Self {
        Self { eta, x, z: Some(z) }
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().all(|&v| v <= INT_TOL || v >= 1.0 - INT_TOL)
    }

    /// Sites with `x ≥ 1/2`; exact for integral points, nearest rounding otherwise.
    pub fn rounded_sites(&self) -> Vec<usize> {
        self.x.iter().enumerate().filter(|(_, &v)| v >= 0.5).map(|(j, _)| j).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationPath {
    Pool,
    Exact,
    Rounding,
}

#[derive(Debug, Clone)]
pub struct SeparationOutcome {
    pub cuts: Vec<Cut>,
    pub path: SeparationPath,
    /// The exact oracle ran to optimality and found no violated cut.
    pub certified: bool,
    /// Minimal right-hand side found by the exact oracle.
    pub exact_value: Option<f64>,
    /// Follower choice the exact oracle returned.
    pub exact_follower: Option<BinaryChoice>,
}

impl SeparationOutcome {
    fn heuristic(cuts: Vec<Cut>, path: SeparationPath) -> Self {
        Self { cuts, path, certified: false, exact_value: None, exact_follower: None }
    }
}

/// Solves an r-median subproblem, retrying by enumeration if the
/// branch-and-bound stops at its node limit.
pub fn solve_subproblem(rm: &RMedianInstance, cfg: &RMedianConfig) -> RMedianSolution {
    let sol = rmedian_solve(rm, cfg);
    if sol.status == RMedianStatus::Optimal {
        return sol;
    }
    rmedian_enumerate(rm, DEFAULT_ENUMERATION_CAP).unwrap_or(sol)
}

/// Separation state shared across calls: site orders, follower pool, and
/// r-median settings.
#[derive(Debug, Clone)]
pub struct Separator<'a> {
    inst: &'a Instance,
    order: SiteOrder,
    pub pool: FollowerPool,
    pub rmedian: RMedianConfig,
}

impl<'a> Separator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self { inst, order: SiteOrder::new(inst), pool: FollowerPool::new(), rmedian: RMedianConfig::default() }
    }

    pub fn order(&self) -> &SiteOrder {
        &self.order
    }

    fn finish_exact(&mut self, sol: RMedianSolution, cut: Cut, pt: &RelaxPoint) -> SeparationOutcome {
        let y = BinaryChoice::from_sites(self.inst.n(), &sol.sites);
        self.pool.insert(self.inst, y.clone());
        let violated = cut.violation(pt.eta, &pt.x, pt.z.as_deref()) > EPS_VIOL;
        let optimal = sol.status == RMedianStatus::Optimal;
        SeparationOutcome {
            cuts: if violated { vec![cut] } else { Vec::new() },
            path: SeparationPath::Exact,
            certified: optimal && !violated,
            exact_value: Some(sol.value),
            exact_follower: Some(y),
        }
    }

    pub fn sf(&mut self, pt: &RelaxPoint) -> SeparationOutcome {
        let inst = self.inst;
        let set = pt.rounded_sites();
        let mut cuts = Vec::new();
        for (y, cy) in self.pool.iter() {
            let cut = submodular_cut_with(inst, cy, &y.sites(), &set);
            if cut.violation(pt.eta, &pt.x, None) > EPS_VIOL {
                cuts.push(cut);
            }
        }
        if !pt.is_integral() {
            return SeparationOutcome::heuristic(cuts, SeparationPath::Rounding);
        }
        if !cuts.is_empty() {
            return SeparationOutcome::heuristic(cuts, SeparationPath::Pool);
        }
        let sol = if set.is_empty() {
            // Every follower choice gives G = 0 on the empty set.
            let sites: Vec<usize> = (0..inst.r()).collect();
            RMedianSolution {
                sites,
                value: 0.0,
                status: RMedianStatus::Optimal,
                lower_bound: 0.0,
                root_bound: 0.0,
                nodes: 0,
                node_bounds: Vec::new(),
            }
        } else {
            let x = BinaryChoice::from_sites(inst.n(), &set);
            let rm = response_costs(inst, &x).expect("nonempty leader set");
            solve_subproblem(&rm, &self.rmedian)
        };
        let y = BinaryChoice::from_sites(inst.n(), &sol.sites);
        let cy = compute_cy(inst, &y).expect("r >= 1");
        let cut = submodular_cut_with(inst, &cy, &sol.sites, &set);
        self.finish_exact(sol, cut, pt)
    }

    pub fn gsf(&mut self, pt: &RelaxPoint) -> SeparationOutcome {
        let inst = self.inst;
        let ell = tight_ell(&self.order, &pt.x);
        let mut cuts = Vec::new();
        for (y, cy) in self.pool.iter() {
            let cut = improved_cut_with(inst, cy, &y.sites(), &ell);
            if cut.violation(pt.eta, &pt.x, None) > EPS_VIOL {
                cuts.push(cut);
            }
        }
        if !cuts.is_empty() {
            return SeparationOutcome::heuristic(cuts, SeparationPath::Pool);
        }
        let rm = gsf_separation_costs(inst, &self.order, &pt.x);
        let sol = solve_subproblem(&rm, &self.rmedian);
        let y = BinaryChoice::from_sites(inst.n(), &sol.sites);
        let cy = compute_cy(inst, &y).expect("r >= 1");
        let cut = improved_cut_with(inst, &cy, &sol.sites, &ell);
        self.finish_exact(sol, cut, pt)
    }

    pub fn ef(&mut self, pt: &RelaxPoint) -> SeparationOutcome {
        let inst = self.inst;
        let z = pt.z.as_deref().expect("EF separation needs z");
        let rm = ef_separation_costs(inst, z);
        let sol = solve_subproblem(&rm, &self.rmedian);
        let y = BinaryChoice::from_sites(inst.n(), &sol.sites);
        let cy = compute_cy(inst, &y).expect("r >= 1");
        let cut = ef_cut_with(inst, &cy, &sol.sites);
        self.finish_exact(sol, cut, pt)
    }
}

/// SF separation with a caller-owned pool.
pub fn separate_sf(pt: &RelaxPoint, inst: &Instance, pool: &mut FollowerPool) -> SeparationOutcome {
    with_pool(inst, pool, |s| s.sf(pt))
}

/// GSF separation with a caller-owned pool.
pub fn separate_gsf(pt: &RelaxPoint, inst: &Instance, pool: &mut FollowerPool) -> SeparationOutcome {
    with_pool(inst, pool, |s| s.gsf(pt))
}

pub fn separate_ef(pt: &RelaxPoint, inst: &Instance) -> SeparationOutcome {
    Separator::new(inst).ef(pt)
}

fn with_pool<F>(inst: &Instance, pool: &mut FollowerPool, f: F) -> SeparationOutcome
where
    F: FnOnce(&mut Separator<'_>) -> SeparationOutcome,
{
    let mut sep = Separator::new(inst);
    sep.pool = std::mem::take(pool);
    let out = f(&mut sep);
    *pool = sep.pool;
    out
}

/// The `p` sites with the largest LP values, ties to the lower index.
pub fn round_top_p(x: &[f64], p: usize) -> BinaryChoice {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    BinaryChoice::from_sites(x.len(), &idx[..p.min(x.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::greedy_allocation;
    use crate::instance::{generate_instance, GeneratorParams, GeneratorStyle};
    use crate::market::{follower_best_response, leader_share, ResponseMode};
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small(seed: u64, n: usize, p: usize, r: usize) -> Instance {
        generate_instance(&GeneratorParams { style: GeneratorStyle::Qi, m: 5, n, p, r, seed }).unwrap()
    }

    fn min_over_y<F: Fn(&CyMatrix, &[usize]) -> f64>(inst: &Instance, f: F) -> f64 {
        (0..inst.n())
            .combinations(inst.r())
            .map(|ys| {
                let cy = compute_cy(inst, &BinaryChoice::from_sites(inst.n(), &ys)).unwrap();
                f(&cy, &ys)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn golden_sf_exact_cut() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        let out = separate_sf(&RelaxPoint::new(1.6, vec![1.0, 1.0, 0.0]), &inst, &mut pool);
        assert_eq!(out.path, SeparationPath::Exact);
        assert_eq!(out.cuts.len(), 1);
        assert_abs_diff_eq!(out.cuts[0].constant, 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(pool.len(), 1);
        assert!(pool.contains(&BinaryChoice::all(3)));

        // Same point again: the pool now produces the cut.
        let again = separate_sf(&RelaxPoint::new(1.6, vec![1.0, 1.0, 0.0]), &inst, &mut pool);
        assert_eq!(again.path, SeparationPath::Pool);
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn zero_eta_gives_no_cut() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        for x in [vec![1.0, 1.0, 0.0], vec![0.5, 0.7, 0.8]] {
            assert!(separate_sf(&RelaxPoint::new(0.0, x.clone()), &inst, &mut pool).cuts.is_empty());
            assert!(separate_gsf(&RelaxPoint::new(0.0, x), &inst, &mut pool).cuts.is_empty());
        }
    }

    #[test]
    fn sf_exact_at_true_value_certifies() {
        for seed in 0..10 {
            let inst = small(seed, 6, 2, 2);
            let x = BinaryChoice::from_sites(6, &[seed as usize % 6, (seed as usize + 3) % 6]);
            let (_, value) = follower_best_response(&inst, &x, ResponseMode::Enumerate { cap: 1000 }).unwrap();
            let mut pool = FollowerPool::new();
            let out = separate_sf(&RelaxPoint::new(value, x.as_f64()), &inst, &mut pool);
            assert!(out.cuts.is_empty() && out.certified);
            assert_abs_diff_eq!(out.exact_value.unwrap(), value, epsilon = 1e-12);
        }
    }

    #[test]
    fn golden_gsf_cuts_off_sf_point() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        let t = 2.0 / 3.0;
        let out = separate_gsf(&RelaxPoint::new(25.0 / 18.0, vec![t, t, t]), &inst, &mut pool);
        assert_eq!(out.cuts.len(), 1);
        assert_abs_diff_eq!(out.exact_value.unwrap(), 4.0 / 3.0, epsilon = 1e-12);

        let mut pool = FollowerPool::new();
        let out = separate_gsf(&RelaxPoint::new(4.0 / 3.0, vec![1.0, 1.0, 0.0]), &inst, &mut pool);
        assert!(out.cuts.is_empty() && out.certified);
        assert_abs_diff_eq!(out.exact_value.unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn gsf_zero_mass() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        let out = separate_gsf(&RelaxPoint::new(0.1, vec![0.0; 3]), &inst, &mut pool);
        assert_eq!(out.cuts.len(), 1);
        assert_eq!(out.cuts[0].constant, 0.0);
        assert_eq!(out.exact_value, Some(0.0));
    }

    #[test]
    fn ef_cases() {
        let inst = Instance::golden_example();
        let out = separate_ef(&RelaxPoint::with_z(0.5, vec![0.0; 3], vec![0.0; 9]), &inst);
        assert_eq!(out.cuts.len(), 1);

        let order = SiteOrder::new(&inst);
        let x = vec![1.0, 1.0, 0.0];
        let z = greedy_allocation(&inst, &order, &x);
        let out = separate_ef(&RelaxPoint::with_z(4.0 / 3.0, x, z), &inst);
        assert!(out.cuts.is_empty() && out.certified);
        assert_abs_diff_eq!(out.exact_value.unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rounding_never_claims_exactness() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        pool.insert(&inst, BinaryChoice::all(3));
        let out = separate_sf(&RelaxPoint::new(1.5, vec![0.5, 0.4, 0.9]), &inst, &mut pool);
        assert_eq!(out.path, SeparationPath::Rounding);
        assert!(!out.certified);
        // Rounded set {1,3} gives η ≤ 4/3 + (1/6)x₂.
        assert_eq!(out.cuts.len(), 1);
        assert_abs_diff_eq!(out.cuts[0].constant, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_results_at_integral_points_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for seed in 0..15 {
            let inst = small(seed, 6, 2, 2);
            let order = SiteOrder::new(&inst);
            for xs in (0..6).combinations(2) {
                let x = BinaryChoice::from_sites(6, &xs);
                let xf = x.as_f64();
                let truth = min_over_y(&inst, |cy, _| crate::market::set_share(&inst, cy, &xs));
                let eta = truth + rng.gen_range(-0.05..0.05);
                let z = greedy_allocation(&inst, &order, &xf);
                let pt = RelaxPoint::new(eta, xf.clone());
                let mut pool = FollowerPool::new();
                let sf = separate_sf(&pt, &inst, &mut pool);
                let gsf = separate_gsf(&pt, &inst, &mut FollowerPool::new());
                let ef = separate_ef(&RelaxPoint::with_z(eta, xf, z), &inst);
                for out in [sf, gsf, ef] {
                    assert_eq!(out.cuts.is_empty(), eta <= truth + EPS_VIOL, "seed {seed} x {xs:?}");
                }
            }
        }
    }

    #[test]
    fn cuts_keep_integral_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for seed in 0..10 {
            let inst = small(seed, 7, 3, 2);
            let mut pool = FollowerPool::new();
            let mut cuts = Vec::new();
            for _ in 0..20 {
                let x: Vec<f64> = (0..7).map(|_| rng.gen_range(0.0..1.0)).collect();
                let eta = rng.gen_range(0.0..inst.total_weight());
                cuts.extend(separate_gsf(&RelaxPoint::new(eta, x.clone()), &inst, &mut pool).cuts);
                cuts.extend(separate_sf(&RelaxPoint::new(eta, x), &inst, &mut pool).cuts);
            }
            for xs in (0..7).combinations(3) {
                let x = BinaryChoice::from_sites(7, &xs);
                let (y, _) = follower_best_response(&inst, &x, ResponseMode::Enumerate { cap: 1000 }).unwrap();
                let g = leader_share(&inst, &x, &y).unwrap();
                for cut in &cuts {
                    assert!(cut.rhs(&x.as_f64(), None) >= g - 1e-12);
                }
            }
        }
    }

    #[test]
    fn pool_has_no_duplicates() {
        let inst = Instance::golden_example();
        let mut pool = FollowerPool::new();
        assert!(pool.insert(&inst, BinaryChoice::all(3)));
        assert!(!pool.insert(&inst, BinaryChoice::all(3)));
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn top_p_rounding() {
        assert_eq!(round_top_p(&[0.2, 0.9, 0.9, 0.1], 2).sites(), vec![1, 2]);
        assert_eq!(round_top_p(&[0.5, 0.5, 0.5], 1).sites(), vec![0]);
    }
}
