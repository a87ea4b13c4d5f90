//! Cut coefficients for the three formulations.
//!
//! * SF: `η ≤ G_y(S) + Σ_{j∉S} ρ_j(S) x_j` for a site set `S`.
//! * GSF: `η ≤ Σ_i w_i (c_{iℓ_i} + Σ_j (c_ij − c_{iℓ_i})⁺ x_j)` for an
//!   anchor vector `ℓ`, one anchor per customer.
//! * EF: `η ≤ Σ_i Σ_j w_i c_ij z_ij`.
//!
//! Sites are 0-based; index `n` is the virtual site with `v = c = 0`.

use serde::Serialize;

use crate::instance::{BinaryChoice, Instance};
use crate::market::{compute_cy, CyMatrix, MarketError};
use crate::rmedian::RMedianInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CutKind {
    Sf,
    Gsf,
    Ef,
}

/// What, besides the follower choice, determined a cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Anchor {
    Set(Vec<usize>),
    Ell(Vec<usize>),
    None,
}

/// Identity used for duplicate suppression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutKey {
    pub kind: CutKind,
    pub follower: Vec<usize>,
    pub anchor: Anchor,
}

/// `η ≤ constant + Σ_j xcoef_j x_j + Σ_ij zcoef_ij z_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    pub constant: f64,
    /// Length `n` for SF/GSF, empty for EF.
    pub xcoef: Vec<f64>,
    /// Row-major `m × n` for EF, empty otherwise.
    pub zcoef: Vec<f64>,
    /// Open follower sites of the `y` that produced the cut.
    pub follower: Vec<usize>,
    pub anchor: Anchor,
}

impl Cut {
    pub fn key(&self) -> CutKey {
        CutKey { kind: self.kind, follower: self.follower.clone(), anchor: self.anchor.clone() }
    }

    /// Right-hand side at `(x, z)`; `z` is ignored for SF/GSF cuts.
    pub fn rhs(&self, x: &[f64], z: Option<&[f64]>) -> f64 {
        let mut value = self.constant;
        value += self.xcoef.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if !self.zcoef.is_empty() {
            let z = z.expect("EF cut evaluated without z");
            value += self.zcoef.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        }
        value
    }

    /// `η − rhs`; positive means the point violates the cut.
    pub fn violation(&self, eta: f64, x: &[f64], z: Option<&[f64]>) -> f64 {
        eta - self.rhs(x, z)
    }
}

/// Per-customer anchors; entry `n` denotes the virtual site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EllVector(pub Vec<usize>);

impl EllVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// All anchors at the virtual site.
    pub fn virtual_all(m: usize, n: usize) -> Self {
        Self(vec![n; m])
    }
}

/// For each customer, sites sorted by descending attractiveness (ties by index).
#[derive(Debug, Clone)]
pub struct SiteOrder {
    n: usize,
    sigma: Vec<usize>,
}

impl SiteOrder {
    pub fn new(inst: &Instance) -> Self {
        let n = inst.n();
        let mut sigma = Vec::with_capacity(inst.m() * n);
        for i in 0..inst.m() {
            let row = inst.v_row(i);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            sigma.extend(idx);
        }
        Self { n, sigma }
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.sigma[i * self.n..(i + 1) * self.n]
    }
}

/// Position `k_i` (1-based, as a count of leading sites) and the prefix mass
/// it covers.
fn split_point(order: &[usize], xstar: &[f64]) -> (usize, f64) {
    let n = order.len();
    let first = xstar[order[0]].clamp(0.0, 1.0);
    if first >= 1.0 {
        return (1, 1.0);
    }
    let mut mass = 0.0;
    let mut k = 0;
    for (pos, &j) in order.iter().enumerate() {
        let next = mass + xstar[j].clamp(0.0, 1.0);
        if next < 1.0 {
            mass = next;
            k = pos + 1;
        } else {
            break;
        }
    }
    debug_assert!(k >= 1 && k <= n);
    (k, mass)
}

/// Anchor vector minimizing the improved-cut right-hand side at `xstar`
/// for every follower choice: `ℓ_i = σ_i(k_i + 1)`.
pub fn tight_ell(order: &SiteOrder, xstar: &[f64]) -> EllVector {
    let n = order.n;
    let m = order.sigma.len() / n.max(1);
    EllVector(
        (0..m)
            .map(|i| {
                let row = order.row(i);
                let (k, _) = split_point(row, xstar);
                if k < n {
                    row[k]
                } else {
                    n
                }
            })
            .collect(),
    )
}

pub fn submodular_cut_with(inst: &Instance, cy: &CyMatrix, follower: &[usize], set: &[usize]) -> Cut {
    let n = inst.n();
    let mut in_set = vec![false; n];
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &j in &sorted {
        in_set[j] = true;
    }
    let mut constant = 0.0;
    let mut xcoef = vec![0.0; n];
    for i in 0..inst.m() {
        let row = cy.row(i);
        let w = inst.w(i);
        let best = sorted.iter().map(|&j| row[j]).fold(0.0, f64::max);
        constant += w * best;
        for j in (0..n).filter(|&j| !in_set[j]) {
            let gain = row[j] - best;
            if gain > 0.0 {
                xcoef[j] += w * gain;
            }
        }
    }
    Cut {
        kind: CutKind::Sf,
        constant,
        xcoef,
        zcoef: Vec::new(),
        follower: follower.to_vec(),
        anchor: Anchor::Set(sorted),
    }
}

/// Classic submodular cut at site set `set` for follower choice `y`.
pub fn submodular_cut(inst: &Instance, y: &BinaryChoice, set: &[usize]) -> Result<Cut, MarketError> {
    let cy = compute_cy(inst, y)?;
    Ok(submodular_cut_with(inst, &cy, &y.sites(), set))
}

pub fn improved_cut_with(inst: &Instance, cy: &CyMatrix, follower: &[usize], ell: &EllVector) -> Cut {
    let n = inst.n();
    let mut constant = 0.0;
    let mut xcoef = vec![0.0; n];
    for (i, &l) in ell.as_slice().iter().enumerate() {
        let w = inst.w(i);
        let anchor = cy.get(i, l);
        constant += w * anchor;
        for (j, &c) in cy.row(i).iter().enumerate() {
            if c > anchor {
                xcoef[j] += w * (c - anchor);
            }
        }
    }
    Cut {
        kind: CutKind::Gsf,
        constant,
        xcoef,
        zcoef: Vec::new(),
        follower: follower.to_vec(),
        anchor: Anchor::Ell(ell.0.clone()),
    }
}

/// Improved submodular cut for anchors `ell`.
pub fn improved_cut(inst: &Instance, y: &BinaryChoice, ell: &EllVector) -> Result<Cut, MarketError> {
    assert_eq!(ell.0.len(), inst.m(), "one anchor per customer");
    assert!(ell.0.iter().all(|&l| l <= inst.n()), "anchor out of range");
    let cy = compute_cy(inst, y)?;
    Ok(improved_cut_with(inst, &cy, &y.sites(), ell))
}

/// The GSF cut that an SF cut at `set` coincides with.
pub fn ell_for_set(cy: &CyMatrix, set: &[usize]) -> EllVector {
    let n = cy.n();
    EllVector(
        (0..cy.m())
            .map(|i| {
                let row = cy.row(i);
                set.iter().copied().max_by(|&a, &b| row[a].total_cmp(&row[b]).then(b.cmp(&a))).unwrap_or(n)
            })
            .collect(),
    )
}

/// `b_ik`: the minimal improved-cut right-hand side at `xstar` for follower
/// choice `y` equals `Σ_i w_i min_{k open} b_ik`.
pub fn gsf_separation_costs(inst: &Instance, order: &SiteOrder, xstar: &[f64]) -> RMedianInstance {
    let (m, n) = (inst.m(), inst.n());
    let mut cost = Vec::with_capacity(m * n);
    for i in 0..m {
        let row = inst.v_row(i);
        let sigma = order.row(i);
        let (k, mass) = split_point(sigma, xstar);
        let anchor_v = if k < n { row[sigma[k]] } else { 0.0 };
        let rest = (1.0 - mass).max(0.0);
        for vk in row {
            let mut b = if anchor_v > 0.0 { rest * anchor_v / (anchor_v + vk) } else { 0.0 };
            for &j in &sigma[..k] {
                let x = xstar[j].clamp(0.0, 1.0);
                b += x * row[j] / (row[j] + vk);
            }
            cost.push(b);
        }
    }
    RMedianInstance::new(m, n, cost, inst.weights().to_vec(), inst.r()).expect("b costs are nonnegative")
}

pub fn ef_cut_with(inst: &Instance, cy: &CyMatrix, follower: &[usize]) -> Cut {
    let (m, n) = (inst.m(), inst.n());
    let mut zcoef = Vec::with_capacity(m * n);
    for i in 0..m {
        let w = inst.w(i);
        zcoef.extend(cy.row(i).iter().map(|c| w * c));
    }
    Cut {
        kind: CutKind::Ef,
        constant: 0.0,
        xcoef: Vec::new(),
        zcoef,
        follower: follower.to_vec(),
        anchor: Anchor::None,
    }
}

/// `η ≤ Σ_i Σ_j w_i c^y_ij z_ij`.
pub fn ef_cut(inst: &Instance, y: &BinaryChoice) -> Result<Cut, MarketError> {
    let cy = compute_cy(inst, y)?;
    Ok(ef_cut_with(inst, &cy, &y.sites()))
}

/// `d_ik = Σ_j z_ij v_ij / (v_ij + v_ik)`.
pub fn ef_separation_costs(inst: &Instance, zstar: &[f64]) -> RMedianInstance {
    let (m, n) = (inst.m(), inst.n());
    assert_eq!(zstar.len(), m * n);
    let mut cost = Vec::with_capacity(m * n);
    for i in 0..m {
        let row = inst.v_row(i);
        let zrow = &zstar[i * n..(i + 1) * n];
        for &vk in row {
            let d: f64 = row
                .iter()
                .zip(zrow)
                .filter(|(_, &z)| z > 0.0)
                .map(|(&vj, &z)| z.min(1.0) * vj / (vj + vk))
                .sum();
            cost.push(d);
        }
    }
    RMedianInstance::new(m, n, cost, inst.weights().to_vec(), inst.r()).expect("d costs are nonnegative")
}

/// Greedy customer allocation for a fixed `x`: each customer takes mass from
/// its most attractive sites first, up to one unit in total.
pub fn greedy_allocation(inst: &Instance, order: &SiteOrder, x: &[f64]) -> Vec<f64> {
    let (m, n) = (inst.m(), inst.n());
    let mut z = vec![0.0; m * n];
    for i in 0..m {
        let mut left = 1.0f64;
        for &j in order.row(i) {
            if left <= 0.0 {
                break;
            }
            let take = x[j].clamp(0.0, 1.0).min(left);
            z[i * n + j] = take;
            left -= take;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GeneratorParams, GeneratorStyle};
    use crate::market::{leader_share, set_share};
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn assert_cut(cut: &Cut, constant: f64, coef: &[f64]) {
        assert_abs_diff_eq!(cut.constant, constant, epsilon = EPS);
        for (a, b) in cut.xcoef.iter().zip(coef) {
            assert_abs_diff_eq!(*a, *b, epsilon = EPS);
        }
    }

    fn random_instance(seed: u64, m: usize, n: usize, p: usize, r: usize) -> Instance {
        let style = if seed % 2 == 0 { GeneratorStyle::Qi } else { GeneratorStyle::Biesinger };
        let m = if style == GeneratorStyle::Biesinger { n } else { m };
        generate_instance(&GeneratorParams { style, m, n, p, r, seed }).unwrap()
    }

    fn random_choice(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BinaryChoice {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        BinaryChoice::from_sites(n, &idx[..k])
    }

    #[test]
    fn golden_submodular_cuts() {
        let inst = Instance::golden_example();
        let y = BinaryChoice::all(3);
        let sixth = 1.0 / 6.0;
        assert_cut(&submodular_cut(&inst, &y, &[0, 1, 2]).unwrap(), 1.5, &[0.0, 0.0, 0.0]);
        assert_cut(&submodular_cut(&inst, &y, &[]).unwrap(), 0.0, &[7.0 / 6.0; 3]);
        assert_cut(&submodular_cut(&inst, &y, &[0]).unwrap(), 7.0 / 6.0, &[0.0, sixth, sixth]);
        // Two-element sets give the 4/3 family.
        assert_cut(&submodular_cut(&inst, &y, &[0, 1]).unwrap(), 4.0 / 3.0, &[0.0, 0.0, sixth]);
    }

    #[test]
    fn golden_improved_cuts() {
        let inst = Instance::golden_example();
        let y = BinaryChoice::all(3);
        let sixth = 1.0 / 6.0;
        assert_cut(&improved_cut(&inst, &y, &EllVector(vec![0, 1, 0])).unwrap(), 1.0, &[sixth; 3]);
        assert_cut(&improved_cut(&inst, &y, &EllVector::virtual_all(3, 3)).unwrap(), 0.0, &[7.0 / 6.0; 3]);
        // Anchors at each customer's favourite site leave no positive parts.
        let cut = improved_cut(&inst, &y, &EllVector(vec![1, 0, 2])).unwrap();
        assert_cut(&cut, 1.5, &[0.0; 3]);
        let cut = improved_cut(&inst, &y, &EllVector(vec![0, 3, 1])).unwrap();
        assert_cut(&cut, 2.0 / 3.0, &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn golden_tight_ell() {
        let inst = Instance::golden_example();
        let order = SiteOrder::new(&inst);
        assert_eq!(order.row(0), &[1, 0, 2]);
        assert_eq!(order.row(1), &[0, 1, 2]);
        assert_eq!(order.row(2), &[2, 0, 1]);
        assert_eq!(tight_ell(&order, &[1.0, 1.0, 0.0]), EllVector(vec![0, 1, 0]));
        assert_eq!(tight_ell(&order, &[0.0, 0.0, 0.0]), EllVector(vec![3, 3, 3]));
        let two_thirds = 2.0 / 3.0;
        assert_eq!(tight_ell(&order, &[two_thirds; 3]), EllVector(vec![0, 1, 0]));
    }

    #[test]
    fn golden_b_costs() {
        let inst = Instance::golden_example();
        let order = SiteOrder::new(&inst);
        let b = gsf_separation_costs(&inst, &order, &[1.0, 1.0, 0.0]);
        let expect = [[2. / 3., 0.5, 2. / 3.], [0.5, 2. / 3., 2. / 3.], [0.5, 0.5, 1. / 3.]];
        for (i, row) in expect.iter().enumerate() {
            for (k, want) in row.iter().enumerate() {
                assert_abs_diff_eq!(b.cost(i, k), *want, epsilon = EPS);
            }
        }
        assert_abs_diff_eq!(b.evaluate(&[0, 1, 2]), 4.0 / 3.0, epsilon = EPS);

        let zero = gsf_separation_costs(&inst, &order, &[0.0; 3]);
        assert!((0..3).all(|i| zero.cost_row(i).iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn golden_ef_cut_and_d_costs() {
        let inst = Instance::golden_example();
        let cut = ef_cut(&inst, &BinaryChoice::all(3)).unwrap();
        assert_abs_diff_eq!(cut.zcoef[0], 1.0 / 3.0, epsilon = EPS);
        assert_abs_diff_eq!(cut.zcoef[1], 0.5, epsilon = EPS);
        assert_abs_diff_eq!(cut.zcoef[2], 1.0 / 3.0, epsilon = EPS);
        assert_eq!(cut.constant, 0.0);

        let mut z = vec![0.0; 9];
        z[1] = 1.0;
        let d = ef_separation_costs(&inst, &z);
        for (k, want) in [2. / 3., 0.5, 2. / 3.].into_iter().enumerate() {
            assert_abs_diff_eq!(d.cost(0, k), want, epsilon = EPS);
        }
        let d0 = ef_separation_costs(&inst, &[0.0; 9]);
        assert!((0..3).all(|i| d0.cost_row(i).iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn weighted_symmetric_ef_row() {
        let inst = Instance::new(vec![3.0], vec![vec![1.0, 1.0]], 1, 1).unwrap();
        let cut = ef_cut(&inst, &BinaryChoice::from_sites(2, &[0])).unwrap();
        assert_eq!(cut.zcoef, vec![1.5, 1.5]);
    }

    #[test]
    fn sf_cuts_are_gsf_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..40 {
            let inst = random_instance(seed, 5, 6, 2, 2);
            let r = rng.gen_range(1..=6);
            let y = random_choice(&mut rng, 6, r);
            let cy = compute_cy(&inst, &y).unwrap();
            let k = rng.gen_range(0..=6);
            let set = random_choice(&mut rng, 6, k).sites();
            let sf = submodular_cut_with(&inst, &cy, &y.sites(), &set);
            let gsf = improved_cut_with(&inst, &cy, &y.sites(), &ell_for_set(&cy, &set));
            assert_eq!(sf.constant, gsf.constant);
            assert_eq!(sf.xcoef, gsf.xcoef);
        }
    }

    #[test]
    fn cuts_are_valid_on_every_leader_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..12 {
            let n = 5 + (seed as usize % 4);
            let inst = random_instance(seed, 4, n, 2, 2);
            let order = SiteOrder::new(&inst);
            for _ in 0..5 {
                let r = rng.gen_range(1..=n);
                let y = random_choice(&mut rng, n, r);
                let cy = compute_cy(&inst, &y).unwrap();
                let size = rng.gen_range(0..=n);
                let set = random_choice(&mut rng, n, size).sites();
                let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
                let cuts = [
                    submodular_cut_with(&inst, &cy, &y.sites(), &set),
                    improved_cut_with(&inst, &cy, &y.sites(), &tight_ell(&order, &xs)),
                    improved_cut_with(
                        &inst,
                        &cy,
                        &y.sites(),
                        &EllVector((0..inst.m()).map(|_| rng.gen_range(0..=n)).collect()),
                    ),
                ];
                let ef = ef_cut_with(&inst, &cy, &y.sites());
                for size in 0..=n {
                    for sites in (0..n).combinations(size) {
                        let x = BinaryChoice::from_sites(n, &sites).as_f64();
                        let g = set_share(&inst, &cy, &sites);
                        for cut in &cuts {
                            assert!(g <= cut.rhs(&x, None) + 1e-12);
                        }
                        let z = greedy_allocation(&inst, &order, &x);
                        assert_abs_diff_eq!(ef.rhs(&[], Some(&z)), g, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn tight_ell_is_tight_at_integral_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..30 {
            let inst = random_instance(seed, 6, 7, 3, 2);
            let order = SiteOrder::new(&inst);
            let x = random_choice(&mut rng, 7, 3);
            let y = random_choice(&mut rng, 7, 2);
            let cut = improved_cut(&inst, &y, &tight_ell(&order, &x.as_f64())).unwrap();
            assert_abs_diff_eq!(cut.rhs(&x.as_f64(), None), leader_share(&inst, &x, &y).unwrap(), epsilon = 1e-12);
        }
    }

    /// Brute force over all anchor vectors: the minimal right-hand side at
    /// `xs` must equal the r-median objective with b costs.
    #[test]
    fn b_costs_match_anchor_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..30 {
            let inst = random_instance(seed, 4, 6, 2, 2);
            let m = inst.m().min(4);
            let inst = if inst.m() > m {
                Instance::new(
                    inst.weights()[..m].to_vec(),
                    (0..m).map(|i| inst.v_row(i).to_vec()).collect(),
                    2,
                    2,
                )
                .unwrap()
            } else {
                inst
            };
            let order = SiteOrder::new(&inst);
            let xs: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
            let b = gsf_separation_costs(&inst, &order, &xs);
            for ys in (0..6).combinations(2) {
                let y = BinaryChoice::from_sites(6, &ys);
                let cy = compute_cy(&inst, &y).unwrap();
                let brute = (0..m)
                    .map(|_| 0..=6usize)
                    .multi_cartesian_product()
                    .map(|ell| improved_cut_with(&inst, &cy, &ys, &EllVector(ell)).rhs(&xs, None))
                    .fold(f64::INFINITY, f64::min);
                assert_abs_diff_eq!(brute, b.evaluate(&ys), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn d_costs_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let inst = random_instance(2, 5, 6, 2, 3);
        for _ in 0..50 {
            let z: Vec<f64> = (0..5 * 6).map(|_| rng.gen_range(0.0..1.0)).collect();
            let y = random_choice(&mut rng, 6, 3);
            let d = ef_separation_costs(&inst, &z);
            let cut = ef_cut(&inst, &y).unwrap();
            assert_abs_diff_eq!(d.evaluate(&y.sites()), cut.rhs(&[], Some(&z)), epsilon = 1e-12);
        }
    }

    #[test]
    fn coefficients_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let inst = random_instance(4, 6, 6, 2, 2);
        let order = SiteOrder::new(&inst);
        for _ in 0..100 {
            let y = random_choice(&mut rng, 6, 2);
            let xs: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
            let cut = improved_cut(&inst, &y, &tight_ell(&order, &xs)).unwrap();
            assert!(cut.constant >= 0.0 && cut.xcoef.iter().all(|&c| c >= 0.0 && c.is_finite()));
        }
    }
}
