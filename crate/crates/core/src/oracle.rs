//! Brute-force ground truth: the max–min bilevel value by enumeration and
//! fully described LP relaxations.
//!
//! Shares and cut coefficients are recomputed here from `v` directly rather
//! than through the cut builders.

use itertools::Itertools;
use thiserror::Error;

use crate::bnc::{base_model, z_col, Formulation};
use crate::instance::{BinaryChoice, Instance};
use crate::lp::{LpSolver, LpStatus};
use crate::rmedian::binomial;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{what}: {count} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, count: u64, cap: u64 },
    #[error("LP failed: {0}")]
    Lp(String),
}

#[derive(Debug, Clone)]
pub struct OracleCaps {
    /// Leader–follower pairs evaluated by [`brute_force_solve`].
    pub pairs: u64,
    /// Follower choices enumerated by the full relaxations.
    pub followers: u64,
    /// Rows of the fully enumerated SF relaxation.
    pub sf_rows: u64,
    pub generation_rounds: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { pairs: 10_000_000, followers: 100_000, sf_rows: 1 << 20, generation_rounds: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderResponse {
    pub leader: BinaryChoice,
    pub follower: BinaryChoice,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub value: f64,
    /// Every leader choice attaining the value (relative tolerance 1e-12).
    pub optimal_sets: Vec<BinaryChoice>,
    /// Best response to each leader choice, when requested.
    pub responses: Vec<LeaderResponse>,
}

/// `Σ_i w_i L_i/(L_i + F_i)` with `L_i, F_i` the best open attractiveness.
pub fn share(inst: &Instance, leader: &[usize], follower: &[usize]) -> f64 {
    (0..inst.m())
        .map(|i| {
            let row = inst.v_row(i);
            let l = leader.iter().map(|&j| row[j]).fold(0.0, f64::max);
            let f = follower.iter().map(|&k| row[k]).fold(0.0, f64::max);
            if l == 0.0 {
                0.0
            } else {
                inst.w(i) * l / (l + f)
            }
        })
        .sum()
}

/// `c^y` as a dense `m × n` table.
fn share_table(inst: &Instance, follower: &[usize]) -> Vec<Vec<f64>> {
    (0..inst.m())
        .map(|i| {
            let row = inst.v_row(i);
            let f = follower.iter().map(|&k| row[k]).fold(0.0, f64::max);
            row.iter().map(|&v| v / (v + f)).collect()
        })
        .collect()
}

fn followers(inst: &Instance, cap: u64) -> Result<Vec<Vec<usize>>, OracleError> {
    let count = binomial(inst.n(), inst.r());
    if count > cap {
        return Err(OracleError::CapExceeded { what: "follower choices", count, cap });
    }
    Ok((0..inst.n()).combinations(inst.r()).collect())
}

pub fn brute_force_solve(inst: &Instance) -> Result<OracleReport, OracleError> {
    brute_force_solve_with(inst, &OracleCaps::default(), false)
}

pub fn brute_force_solve_with(inst: &Instance, caps: &OracleCaps, record: bool) -> Result<OracleReport, OracleError> {
    let (n, p, r) = (inst.n(), inst.p(), inst.r());
    let count = binomial(n, p).saturating_mul(binomial(n, r));
    if count > caps.pairs {
        return Err(OracleError::CapExceeded { what: "leader-follower pairs", count, cap: caps.pairs });
    }
    let ys: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    let mut scored = Vec::new();
    let mut responses = Vec::new();
    for xs in (0..n).combinations(p) {
        let (best_y, value) = ys
            .iter()
            .map(|y| (y, share(inst, &xs, y)))
            .fold((&ys[0], f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        if record {
            responses.push(LeaderResponse {
                leader: BinaryChoice::from_sites(n, &xs),
                follower: BinaryChoice::from_sites(n, best_y),
                value,
            });
        }
        scored.push((xs, value));
    }
    let value = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * value.abs().max(1.0);
    let optimal_sets =
        scored.iter().filter(|s| s.1 >= value - tol).map(|s| BinaryChoice::from_sites(n, &s.0)).collect();
    Ok(OracleReport { value, optimal_sets, responses })
}

#[derive(Debug, Clone)]
pub struct FullLp {
    pub value: f64,
    pub x: Vec<f64>,
    /// Cut rows in the final model.
    pub rows: usize,
}

/// Per-customer minimum over anchors of `c_ℓ + Σ_j (c_j − c_ℓ)⁺ x_j`,
/// returning the cut `(constant, xcoef)` at the minimizing anchors.
pub fn min_anchor_cut(inst: &Instance, table: &[Vec<f64>], x: &[f64]) -> (f64, Vec<f64>) {
    let n = inst.n();
    let mut constant = 0.0;
    let mut coef = vec![0.0; n];
    for (i, row) in table.iter().enumerate() {
        let anchors = row.iter().copied().chain(std::iter::once(0.0));
        let value_at = |a: f64| a + row.iter().zip(x).map(|(&c, &xj)| (c - a).max(0.0) * xj).sum::<f64>();
        let best = anchors.fold((f64::INFINITY, 0.0), |acc, a| {
            let v = value_at(a);
            if v < acc.0 {
                (v, a)
            } else {
                acc
            }
        });
        let w = inst.w(i);
        constant += w * best.1;
        for (j, &c) in row.iter().enumerate() {
            coef[j] += w * (c - best.1).max(0.0);
        }
    }
    (constant, coef)
}

fn x_cut_row(n: usize, constant: f64, coef: &[f64]) -> (Vec<(usize, f64)>, f64) {
    let mut row = vec![(n, 1.0)];
    row.extend(coef.iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(j, &a)| (j, -a)));
    (row, constant)
}

fn solve_lp(lp: &mut LpSolver) -> Result<crate::lp::LpResult, OracleError> {
    let res = lp.solve();
    if res.status != LpStatus::Optimal {
        return Err(OracleError::Lp(format!("{:?} {:?}", res.status, res.diagnostic)));
    }
    Ok(res)
}

/// The LP relaxation of `formulation` with its complete cut family.
pub fn full_lp(inst: &Instance, formulation: Formulation, caps: &OracleCaps) -> Result<FullLp, OracleError> {
    let (m, n) = (inst.m(), inst.n());
    let ys = followers(inst, caps.followers)?;
    let mut lp = LpSolver::new(base_model(inst, formulation));
    let mut rows = 0;
    match formulation {
        Formulation::Sf => {
            let count = (1u64 << n.min(63)).saturating_mul(ys.len() as u64);
            if n >= 63 || count > caps.sf_rows {
                return Err(OracleError::CapExceeded { what: "SF rows", count, cap: caps.sf_rows });
            }
            for y in &ys {
                let table = share_table(inst, y);
                for mask in 0u64..(1 << n) {
                    let in_set = |j: usize| mask >> j & 1 == 1;
                    let mut constant = 0.0;
                    let mut coef = vec![0.0; n];
                    for (i, row) in table.iter().enumerate() {
                        let best = (0..n).filter(|&j| in_set(j)).map(|j| row[j]).fold(0.0, f64::max);
                        constant += inst.w(i) * best;
                        for j in (0..n).filter(|&j| !in_set(j)) {
                            coef[j] += inst.w(i) * (row[j] - best).max(0.0);
                        }
                    }
                    let (r, c) = x_cut_row(n, constant, &coef);
                    lp.add_row(&r, f64::NEG_INFINITY, c);
                    rows += 1;
                }
            }
        }
        Formulation::Gsf => {
            let tables: Vec<Vec<Vec<f64>>> = ys.iter().map(|y| share_table(inst, y)).collect();
            for round in 0.. {
                if round >= caps.generation_rounds {
                    return Err(OracleError::CapExceeded {
                        what: "row generation rounds",
                        count: round as u64,
                        cap: caps.generation_rounds as u64,
                    });
                }
                let res = solve_lp(&mut lp)?;
                let x = &res.x[..n];
                let eta = res.x[n];
                let mut added = 0;
                for table in &tables {
                    let (constant, coef) = min_anchor_cut(inst, table, x);
                    let rhs = constant + coef.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                    if eta > rhs + 1e-10 {
                        let (r, c) = x_cut_row(n, constant, &coef);
                        lp.add_row(&r, f64::NEG_INFINITY, c);
                        added += 1;
                    }
                }
                rows += added;
                if added == 0 {
                    return Ok(FullLp { value: res.objective, x: x.to_vec(), rows });
                }
            }
        }
        Formulation::Ef => {
            for y in &ys {
                let table = share_table(inst, y);
                let mut r = vec![(n, 1.0)];
                for (i, row) in table.iter().enumerate() {
                    for (j, &c) in row.iter().enumerate() {
                        r.push((z_col(n, i, j), -inst.w(i) * c));
                    }
                }
                lp.add_row(&r, f64::NEG_INFINITY, 0.0);
                rows += 1;
            }
            let _ = m;
        }
    }
    let res = solve_lp(&mut lp)?;
    Ok(FullLp { value: res.objective, x: res.x[..n].to_vec(), rows })
}

pub fn full_lp_value(inst: &Instance, formulation: Formulation) -> Result<f64, OracleError> {
    full_lp(inst, formulation, &OracleCaps::default()).map(|f| f.value)
}
