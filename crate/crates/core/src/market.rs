//! Market shares under the partially binary choice rule and the follower's
//! best response.

use itertools::Itertools;
use thiserror::Error;

use crate::instance::{BinaryChoice, Instance};
use crate::rmedian::{self, RMedianConfig, RMedianError, RMedianInstance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("follower choice opens no site")]
    EmptyFollower,
    #[error("leader choice opens no site")]
    EmptyLeader,
    #[error("choice has length {got}, instance has {n} sites")]
    Length { got: usize, n: usize },
    #[error("choice opens {got} sites, expected {expected}")]
    Cardinality { got: usize, expected: usize },
    #[error(transparent)]
    RMedian(#[from] RMedianError),
}

/// Leader capture coefficients `c[i][j] = v_ij / (v_ij + max_{k open} v_ik)`
/// for a fixed follower choice. Column `n` is a virtual site with value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CyMatrix {
    m: usize,
    n: usize,
    c: Vec<f64>,
    follower_best: Vec<f64>,
}

impl CyMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `j == n` addresses the virtual site.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j == self.n {
            0.0
        } else {
            self.c[i * self.n + j]
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.c[i * self.n..(i + 1) * self.n]
    }

    /// `max_k v_ik y_k` for customer `i`.
    pub fn follower_best(&self, i: usize) -> f64 {
        self.follower_best[i]
    }
}

fn check_len(inst: &Instance, choice: &BinaryChoice) -> Result<(), MarketError> {
    if choice.len() != inst.n() {
        return Err(MarketError::Length { got: choice.len(), n: inst.n() });
    }
    Ok(())
}

pub fn compute_cy(inst: &Instance, y: &BinaryChoice) -> Result<CyMatrix, MarketError> {
    check_len(inst, y)?;
    let open = y.sites();
    if open.is_empty() {
        return Err(MarketError::EmptyFollower);
    }
    let (m, n) = (inst.m(), inst.n());
    let mut c = Vec::with_capacity(m * n);
    let mut follower_best = Vec::with_capacity(m);
    for i in 0..m {
        let row = inst.v_row(i);
        let best = open.iter().map(|&k| row[k]).fold(f64::NEG_INFINITY, f64::max);
        follower_best.push(best);
        c.extend(row.iter().map(|&v| v / (v + best)));
    }
    Ok(CyMatrix { m, n, c, follower_best })
}

/// `G_y(S) = Σ_i w_i max_{j∈S} c^y_ij`, with the empty maximum taken as 0.
pub fn set_share(inst: &Instance, cy: &CyMatrix, sites: &[usize]) -> f64 {
    (0..inst.m())
        .map(|i| {
            let row = cy.row(i);
            inst.w(i) * sites.iter().map(|&j| row[j]).fold(0.0, f64::max)
        })
        .sum()
}

/// Leader's market share `g(x, y)`. An empty leader choice is reported as
/// [`MarketError::EmptyLeader`]; use [`set_share`] for the set-function form
/// where the empty set evaluates to 0.
pub fn leader_share(inst: &Instance, x: &BinaryChoice, y: &BinaryChoice) -> Result<f64, MarketError> {
    check_len(inst, x)?;
    let cy = compute_cy(inst, y)?;
    let sites = x.sites();
    if sites.is_empty() {
        return Err(MarketError::EmptyLeader);
    }
    Ok(set_share(inst, &cy, &sites))
}

/// Follower's market share, evaluated directly from its own ratio.
pub fn follower_share(inst: &Instance, x: &BinaryChoice, y: &BinaryChoice) -> Result<f64, MarketError> {
    check_len(inst, x)?;
    check_len(inst, y)?;
    let (xs, ys) = (x.sites(), y.sites());
    if xs.is_empty() {
        return Err(MarketError::EmptyLeader);
    }
    if ys.is_empty() {
        return Err(MarketError::EmptyFollower);
    }
    Ok((0..inst.m())
        .map(|i| {
            let row = inst.v_row(i);
            let lead = xs.iter().map(|&j| row[j]).fold(0.0, f64::max);
            let foll = ys.iter().map(|&k| row[k]).fold(0.0, f64::max);
            inst.w(i) * foll / (lead + foll)
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseMode {
    /// Scan every follower choice; fails when `C(n, r)` exceeds `cap`.
    Enumerate { cap: u64 },
    RMedian,
}

impl Default for ResponseMode {
    fn default() -> Self {
        Self::RMedian
    }
}

/// `a_ik = c_i / (c_i + v_ik)` with `c_i = max_j v_ij x_j`: minimizing
/// `Σ_i w_i min_k a_ik y_k` over follower choices is the follower's problem.
pub fn response_costs(inst: &Instance, x: &BinaryChoice) -> Result<RMedianInstance, MarketError> {
    check_len(inst, x)?;
    let sites = x.sites();
    if sites.is_empty() {
        return Err(MarketError::EmptyLeader);
    }
    let (m, n) = (inst.m(), inst.n());
    let mut cost = Vec::with_capacity(m * n);
    for i in 0..m {
        let row = inst.v_row(i);
        let lead = sites.iter().map(|&j| row[j]).fold(0.0, f64::max);
        cost.extend(row.iter().map(|&v| lead / (lead + v)));
    }
    Ok(RMedianInstance::new(m, n, cost, inst.weights().to_vec(), inst.r())?)
}

/// The follower's best response to `x` and the resulting leader share.
pub fn follower_best_response(
    inst: &Instance,
    x: &BinaryChoice,
    mode: ResponseMode,
) -> Result<(BinaryChoice, f64), MarketError> {
    check_len(inst, x)?;
    if x.cardinality() != inst.p() {
        return Err(MarketError::Cardinality { got: x.cardinality(), expected: inst.p() });
    }
    match mode {
        ResponseMode::Enumerate { cap } => {
            let count = rmedian::binomial(inst.n(), inst.r());
            if count > cap {
                return Err(RMedianError::CapExceeded { count, cap }.into());
            }
            let leader = x.sites();
            let mut best: Option<(Vec<usize>, f64)> = None;
            for ys in (0..inst.n()).combinations(inst.r()) {
                let y = BinaryChoice::from_sites(inst.n(), &ys);
                let cy = compute_cy(inst, &y)?;
                let value = set_share(inst, &cy, &leader);
                if best.as_ref().map_or(true, |(_, b)| value < *b) {
                    best = Some((ys, value));
                }
            }
            let (ys, value) = best.expect("r >= 1 gives at least one follower choice");
            Ok((BinaryChoice::from_sites(inst.n(), &ys), value))
        }
        ResponseMode::RMedian => {
            let rm = response_costs(inst, x)?;
            let sol = rmedian::rmedian_solve(&rm, &RMedianConfig::default());
            let y = BinaryChoice::from_sites(inst.n(), &sol.sites);
            // Report the share in set form, as the enumeration path does.
            let cy = compute_cy(inst, &y)?;
            Ok((y, set_share(inst, &cy, &x.sites())))
        }
    }
}
