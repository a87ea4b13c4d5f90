//! Desk-scale checks of the polyhedral results: hull equality of the GSF and
//! EF relaxations for a fixed follower choice, the separation identity for
//! the improved cuts, and aggregation of the extended formulation.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bnc::Formulation;
use crate::cuts::{gsf_separation_costs, greedy_allocation, tight_ell, SiteOrder};
use crate::instance::{BinaryChoice, Instance};
use crate::lp::{LpModel, LpSolver, LpStatus};
use crate::market::{compute_cy, set_share, CyMatrix, MarketError};
use crate::oracle::{full_lp, min_anchor_cut, OracleCaps, OracleError};

/// Hex SHA-256 of the instance's text form.
pub fn instance_digest(inst: &Instance) -> String {
    Sha256::digest(inst.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct HullCheckReport {
    pub digest: String,
    pub y: Vec<usize>,
    pub directions: usize,
    pub max_discrepancy: f64,
}

/// Support values `max α·η + βᵀx` over the GSF-cut polytope, the EF
/// relaxation and the integer hypograph points, in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportValues {
    pub gsf: f64,
    pub ef: f64,
    pub enumeration: f64,
}

impl SupportValues {
    pub fn discrepancy(&self) -> f64 {
        (self.gsf - self.enumeration).abs().max((self.ef - self.enumeration).abs())
    }
}

fn table(cy: &CyMatrix) -> Vec<Vec<f64>> {
    (0..cy.m()).map(|i| cy.row(i).to_vec()).collect()
}

fn solved(lp: &mut LpSolver) -> crate::lp::LpResult {
    let res = lp.solve();
    assert_eq!(res.status, LpStatus::Optimal, "support LP: {:?}", res.diagnostic);
    res
}

/// Support values in direction `(alpha, beta)`, with `x ≤ x_upper` when
/// given (default 1). `alpha` must be positive.
pub fn hull_support(inst: &Instance, y: &BinaryChoice, alpha: f64, beta: &[f64], x_upper: Option<&[f64]>) -> SupportValues {
    assert!(alpha > 0.0, "alpha must be positive");
    let (m, n) = (inst.m(), inst.n());
    let cy = compute_cy(inst, y).expect("valid follower choice");
    let up = |j: usize| x_upper.map_or(1.0, |u| u[j]);

    let mut model = LpModel::new(n + 1);
    for j in 0..n {
        model.set_bounds(j, 0.0, up(j));
        model.set_objective(j, beta[j]);
    }
    model.set_bounds(n, f64::NEG_INFINITY, inst.total_weight());
    model.set_objective(n, alpha);

    let tab = table(&cy);
    let mut lp = LpSolver::new(model.clone());
    let gsf = loop {
        let res = solved(&mut lp);
        let x = &res.x[..n];
        let (constant, coef) = min_anchor_cut(inst, &tab, x);
        let rhs = constant + coef.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if res.x[n] <= rhs + 1e-11 {
            break res.objective;
        }
        let mut row = vec![(n, 1.0)];
        row.extend(coef.iter().enumerate().map(|(j, &a)| (j, -a)));
        lp.add_row(&row, f64::NEG_INFINITY, constant);
    };

    let mut ef_model = LpModel::new(n + 1 + m * n);
    for j in 0..n {
        ef_model.set_bounds(j, 0.0, up(j));
        ef_model.set_objective(j, beta[j]);
    }
    ef_model.set_bounds(n, f64::NEG_INFINITY, inst.total_weight());
    ef_model.set_objective(n, alpha);
    let z = |i: usize, j: usize| n + 1 + i * n + j;
    let mut link = vec![(n, 1.0)];
    for i in 0..m {
        for j in 0..n {
            ef_model.set_bounds(z(i, j), 0.0, 1.0);
            ef_model.add_le(&[(z(i, j), 1.0), (j, -1.0)], 0.0);
            link.push((z(i, j), -inst.w(i) * cy.get(i, j)));
        }
        ef_model.add_le(&(0..n).map(|j| (z(i, j), 1.0)).collect::<Vec<_>>(), 1.0);
    }
    ef_model.add_le(&link, 0.0);
    let ef = solved(&mut LpSolver::new(ef_model)).objective;

    let mut enumeration = f64::NEG_INFINITY;
    for mask in 0u64..(1 << n) {
        let sites: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        if sites.iter().any(|&j| up(j) < 1.0) {
            continue;
        }
        let value = alpha * set_share(inst, &cy, &sites) + sites.iter().map(|&j| beta[j]).sum::<f64>();
        enumeration = enumeration.max(value);
    }
    SupportValues { gsf, ef, enumeration }
}

/// Random unit direction in `R^{n+1}` with `α > 0.1`.
fn direction(rng: &mut ChaCha8Rng, n: usize) -> (f64, Vec<f64>) {
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = v[0] / norm;
        if alpha > 0.1 {
            return (alpha, v[1..].iter().map(|a| a / norm).collect());
        }
    }
}

/// Compares support functions of the GSF polytope, the EF relaxation and
/// the integer hypograph over `trials` random directions.
pub fn verify_hull(inst: &Instance, y: &BinaryChoice, trials: usize, seed: u64) -> HullCheckReport {
    assert!(inst.n() <= 10, "hull check enumerates {{0,1}}^n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (alpha, beta) = direction(&mut rng, inst.n());
        worst = worst.max(hull_support(inst, y, alpha, &beta, None).discrepancy());
    }
    HullCheckReport { digest: instance_digest(inst), y: y.sites(), directions: trials, max_discrepancy: worst }
}

/// `|min_ℓ RHS(ℓ; x*) − Σ_i w_i min_{k∈y} b_ik|`, the minimum taken by
/// brute force over all `(n+1)^m` anchor vectors.
pub fn verify_prop61(inst: &Instance, xstar: &[f64], y: &BinaryChoice) -> f64 {
    let (m, n) = (inst.m(), inst.n());
    assert!((n as f64 + 1.0).powi(m as i32) <= 1e6, "too many anchor vectors");
    let cy = compute_cy(inst, y).expect("valid follower choice");
    let brute = (0..m)
        .map(|_| 0..=n)
        .multi_cartesian_product()
        .map(|ell| {
            ell.iter()
                .enumerate()
                .map(|(i, &l)| {
                    let base = cy.get(i, l);
                    let gain: f64 = (0..n).map(|j| (cy.get(i, j) - base).max(0.0) * xstar[j]).sum();
                    inst.w(i) * (base + gain)
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    let order = SiteOrder::new(inst);
    let separated = gsf_separation_costs(inst, &order, xstar).evaluate(&y.sites());
    (brute - separated).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregationReport {
    pub digest: String,
    pub ef_value: f64,
    pub disaggregated_value: f64,
    /// Largest gap between the greedy allocation value and the LP value of
    /// one customer's allocation problem.
    pub greedy_discrepancy: f64,
    /// Largest gap between the closed-form dual value and the LP-solved dual.
    pub dual_discrepancy: f64,
}

impl AggregationReport {
    pub fn lp_discrepancy(&self) -> f64 {
        (self.ef_value - self.disaggregated_value).abs()
    }
}

/// LP with a separate allocation block `z^y` per follower choice.
pub fn disaggregated_lp_value(inst: &Instance, caps: &OracleCaps) -> Result<f64, OracleError> {
    let (m, n, r) = (inst.m(), inst.n(), inst.r());
    let count = crate::rmedian::binomial(n, r);
    if count > caps.followers {
        return Err(OracleError::CapExceeded { what: "follower choices", count, cap: caps.followers });
    }
    let ys: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    let block = m * n;
    let mut model = LpModel::new(n + 1 + ys.len() * block);
    for j in 0..n {
        model.set_bounds(j, 0.0, 1.0);
    }
    model.set_bounds(n, f64::NEG_INFINITY, inst.total_weight());
    model.set_objective(n, 1.0);
    model.add_eq(&(0..n).map(|j| (j, 1.0)).collect::<Vec<_>>(), inst.p() as f64);
    for (t, ys) in ys.iter().enumerate() {
        let cy = compute_cy(inst, &BinaryChoice::from_sites(n, ys)).map_err(|e| OracleError::Lp(e.to_string()))?;
        let z = |i: usize, j: usize| n + 1 + t * block + i * n + j;
        let mut link = vec![(n, 1.0)];
        for i in 0..m {
            for j in 0..n {
                model.set_bounds(z(i, j), 0.0, 1.0);
                model.add_le(&[(z(i, j), 1.0), (j, -1.0)], 0.0);
                link.push((z(i, j), -inst.w(i) * cy.get(i, j)));
            }
            model.add_le(&(0..n).map(|j| (z(i, j), 1.0)).collect::<Vec<_>>(), 1.0);
        }
        model.add_le(&link, 0.0);
    }
    let res = LpSolver::new(model).solve();
    if res.status != LpStatus::Optimal {
        return Err(OracleError::Lp(format!("{:?} {:?}", res.status, res.diagnostic)));
    }
    Ok(res.objective)
}

/// `max Σ_j c_j z_j` subject to `z ≤ x`, `Σ z ≤ 1`, `z ≥ 0`.
fn allocation_lp(c: &[f64], x: &[f64]) -> f64 {
    let n = c.len();
    let mut model = LpModel::new(n);
    for j in 0..n {
        model.set_bounds(j, 0.0, x[j]);
        model.set_objective(j, c[j]);
    }
    model.add_le(&(0..n).map(|j| (j, 1.0)).collect::<Vec<_>>(), 1.0);
    solved(&mut LpSolver::new(model)).objective
}

/// `min u + Σ_j w_j x_j` subject to `u + w_j ≥ c_j`, `u, w ≥ 0`, solved as
/// the maximization of its negation.
fn allocation_dual_lp(c: &[f64], x: &[f64]) -> f64 {
    let n = c.len();
    let mut model = LpModel::new(n + 1);
    model.set_objective(n, -1.0);
    for j in 0..n {
        model.set_objective(j, -x[j]);
        model.add_ge(&[(n, 1.0), (j, 1.0)], c[j]);
    }
    -solved(&mut LpSolver::new(model)).objective
}

/// Checks the aggregated EF relaxation against the per-follower
/// disaggregated LP, and the closed-form allocation and dual solutions
/// against LP solves at `trials` random fractional points.
pub fn verify_aggregation(inst: &Instance, trials: usize, seed: u64) -> Result<AggregationReport, OracleError> {
    let (m, n) = (inst.m(), inst.n());
    if m * n > 400 {
        return Err(OracleError::CapExceeded { what: "m·n", count: (m * n) as u64, cap: 400 });
    }
    let caps = OracleCaps::default();
    let ef_value = full_lp(inst, Formulation::Ef, &caps)?.value;
    let disaggregated_value = disaggregated_lp_value(inst, &caps)?;

    let order = SiteOrder::new(inst);
    let ys: Vec<Vec<usize>> = (0..n).combinations(inst.r()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut greedy_discrepancy: f64 = 0.0;
    let mut dual_discrepancy: f64 = 0.0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let ys = &ys[rng.gen_range(0..ys.len())];
        let cy = compute_cy(inst, &BinaryChoice::from_sites(n, ys)).map_err(|e: MarketError| OracleError::Lp(e.to_string()))?;
        let z = greedy_allocation(inst, &order, &x);
        let ell = tight_ell(&order, &x);
        for i in 0..m {
            let c = cy.row(i);
            let primal = allocation_lp(c, &x);
            let greedy: f64 = c.iter().zip(&z[i * n..(i + 1) * n]).map(|(a, b)| a * b).sum();
            greedy_discrepancy = greedy_discrepancy.max((primal - greedy).abs());

            let u = cy.get(i, ell.as_slice()[i]);
            let closed = u + c.iter().zip(&x).map(|(&cj, &xj)| (cj - u).max(0.0) * xj).sum::<f64>();
            dual_discrepancy = dual_discrepancy.max((closed - allocation_dual_lp(c, &x)).abs());
        }
    }
    Ok(AggregationReport {
        digest: instance_digest(inst),
        ef_value,
        disaggregated_value,
        greedy_discrepancy,
        dual_discrepancy,
    })
}
