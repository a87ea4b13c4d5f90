//! Cross-checks the LP engine against a dense two-phase tableau simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scflp::lp::{lp_solve, LpModel, LpSolver, LpStatus};

/// Textbook tableau simplex with Bland's rule on
/// `max cᵀx, A x (≤|=|≥) b, 0 ≤ x ≤ u` (finite `u`).
mod tableau {
    #[derive(Clone, Copy, PartialEq)]
    pub enum Sense {
        Le,
        Ge,
        Eq,
    }

    pub enum Outcome {
        Optimal(f64),
        Infeasible,
    }

    pub fn solve(c: &[f64], rows: &[(Vec<f64>, Sense, f64)], upper: &[f64]) -> Outcome {
        let n = c.len();
        let mut cons: Vec<(Vec<f64>, Sense, f64)> = rows.to_vec();
        for (j, &u) in upper.iter().enumerate() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cons.push((a, Sense::Le, u));
        }
        for con in cons.iter_mut() {
            if con.2 < 0.0 {
                con.0.iter_mut().for_each(|v| *v = -*v);
                con.2 = -con.2;
                con.1 = match con.1 {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }
        let m = cons.len();
        let nslack = cons.iter().filter(|c| c.1 != Sense::Eq).count();
        let total = n + nslack + m;
        let width = total + 1;
        let mut t = vec![vec![0.0; width]; m];
        let mut basis = vec![0usize; m];
        let mut s = n;
        for (i, (a, sense, b)) in cons.iter().enumerate() {
            t[i][..n].copy_from_slice(a);
            match sense {
                Sense::Le => {
                    t[i][s] = 1.0;
                    s += 1;
                }
                Sense::Ge => {
                    t[i][s] = -1.0;
                    s += 1;
                }
                Sense::Eq => {}
            }
            t[i][n + nslack + i] = 1.0;
            basis[i] = n + nslack + i;
            t[i][total] = *b;
        }
        // Phase 1: maximize −Σ artificials.
        let mut obj1 = vec![0.0; total];
        for i in 0..m {
            obj1[n + nslack + i] = -1.0;
        }
        run(&mut t, &mut basis, &obj1, total);
        let infeas: f64 = basis.iter().zip(&t).filter(|(&b, _)| b >= n + nslack).map(|(_, row)| row[total]).sum();
        if infeas > 1e-9 {
            return Outcome::Infeasible;
        }
        // Drive remaining artificials out of the basis.
        for i in 0..m {
            if basis[i] >= n + nslack {
                if let Some(j) = (0..n + nslack).find(|&j| t[i][j].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
        let mut obj2 = vec![0.0; total];
        obj2[..n].copy_from_slice(c);
        let allowed = n + nslack;
        for row in t.iter_mut() {
            for v in row[allowed..total].iter_mut() {
                *v = 0.0;
            }
        }
        run(&mut t, &mut basis, &obj2, allowed);
        let value = basis.iter().zip(&t).map(|(&b, row)| if b < n { c[b] * row[total] } else { 0.0 }).sum();
        Outcome::Optimal(value)
    }

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, q: usize) {
        let p = t[r][q];
        t[r].iter_mut().for_each(|v| *v /= p);
        let pr = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[q] != 0.0 {
                let f = row[q];
                row.iter_mut().zip(&pr).for_each(|(v, w)| *v -= f * w);
            }
        }
        basis[r] = q;
    }

    fn run(t: &mut [Vec<f64>], basis: &mut [usize], obj: &[f64], allowed: usize) {
        let total = t[0].len() - 1;
        loop {
            let q = (0..allowed).find(|&j| {
                let d = obj[j] - basis.iter().zip(t.iter()).map(|(&b, row)| obj[b] * row[j]).sum::<f64>();
                d > 1e-10
            });
            let Some(q) = q else { return };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in t.iter().enumerate() {
                if row[q] > 1e-10 {
                    let ratio = row[total] / row[q];
                    let better = match best {
                        None => true,
                        Some((bi, br)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && basis[i] < basis[bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let (r, _) = best.expect("bounded by the explicit upper-bound rows");
            pivot(t, basis, r, q);
        }
    }
}

struct RandomLp {
    model: LpModel,
    oracle_c: Vec<f64>,
    oracle_rows: Vec<(Vec<f64>, tableau::Sense, f64)>,
    oracle_upper: Vec<f64>,
    shift: Vec<f64>,
}

impl RandomLp {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.gen_range(2..=20);
        let mut model = LpModel::new(n);
        let mut shift = Vec::new();
        let mut oracle_upper = Vec::new();
        let mut oracle_c = Vec::new();
        for j in 0..n {
            let lo = rng.gen_range(-3.0..3.0f64).round();
            let range = rng.gen_range(0.5..4.0);
            model.set_bounds(j, lo, lo + range);
            let c = rng.gen_range(-5.0..5.0);
            model.set_objective(j, c);
            shift.push(lo);
            oracle_upper.push(range);
            oracle_c.push(c);
        }
        let mut r = RandomLp { model, oracle_c, oracle_rows: Vec::new(), oracle_upper, shift };
        for _ in 0..rng.gen_range(1..=15) {
            r.add_random_row(rng);
        }
        r
    }

    fn add_random_row(&mut self, rng: &mut ChaCha8Rng) -> (Vec<(usize, f64)>, f64, f64) {
        let n = self.shift.len();
        let mut coefs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.5) {
                coefs.push((j, rng.gen_range(-5.0..5.0f64)));
            }
        }
        if coefs.is_empty() {
            coefs.push((rng.gen_range(0..n), 1.0));
        }
        // Anchor the row at a random point inside the box; sometimes push it away.
        let point: Vec<f64> = (0..n).map(|j| self.shift[j] + rng.gen_range(0.0..1.0) * self.oracle_upper[j]).collect();
        let act: f64 = coefs.iter().map(|&(j, a)| a * point[j]).sum();
        let offset = if rng.gen_bool(0.1) { -20.0 } else { rng.gen_range(0.0..2.0) };
        let kind = rng.gen_range(0..4);
        let (lo, up) = match kind {
            0 => (f64::NEG_INFINITY, act + offset),
            1 => (act - offset, f64::INFINITY),
            2 => (act, act),
            _ => (act - offset.abs(), act + offset.abs()),
        };
        self.model.add_row(&coefs, lo, up);
        let mut dense = vec![0.0; n];
        for &(j, a) in &coefs {
            dense[j] += a;
        }
        let base: f64 = (0..n).map(|j| dense[j] * self.shift[j]).sum();
        use tableau::Sense::*;
        if lo == up {
            self.oracle_rows.push((dense, Eq, lo - base));
        } else {
            if lo.is_finite() {
                self.oracle_rows.push((dense.clone(), Ge, lo - base));
            }
            if up.is_finite() {
                self.oracle_rows.push((dense, Le, up - base));
            }
        }
        (coefs, lo, up)
    }

    fn oracle(&self) -> Option<f64> {
        match tableau::solve(&self.oracle_c, &self.oracle_rows, &self.oracle_upper) {
            tableau::Outcome::Optimal(v) => {
                Some(v + self.oracle_c.iter().zip(&self.shift).map(|(c, s)| c * s).sum::<f64>())
            }
            tableau::Outcome::Infeasible => None,
        }
    }
}

#[test]
fn agrees_with_tableau_on_random_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut feasible = 0;
    let mut infeasible = 0;
    for _ in 0..400 {
        let lp = RandomLp::new(&mut rng);
        let res = lp_solve(&lp.model, None);
        match lp.oracle() {
            Some(v) => {
                feasible += 1;
                assert_eq!(res.status, LpStatus::Optimal, "{:?}", res.diagnostic);
                assert!((res.objective - v).abs() <= 1e-8 * (1.0 + v.abs()), "{} vs {v}", res.objective);
                assert!(res.max_primal_violation <= 1e-7);
            }
            None => {
                infeasible += 1;
                assert_eq!(res.status, LpStatus::Infeasible);
            }
        }
    }
    assert!(feasible > 100 && infeasible > 10, "{feasible} feasible, {infeasible} infeasible");
}

#[test]
fn warm_row_addition_matches_cold_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let mut lp = RandomLp::new(&mut rng);
        let mut solver = LpSolver::new(lp.model.clone());
        let mut previous = solver.solve();
        for _ in 0..6 {
            if previous.status != LpStatus::Optimal {
                break;
            }
            let (coefs, lo, up) = lp.add_random_row(&mut rng);
            solver.add_row(&coefs, lo, up);
            let res = solver.solve();
            match lp.oracle() {
                Some(v) => {
                    assert_eq!(res.status, LpStatus::Optimal);
                    assert!((res.objective - v).abs() <= 1e-8 * (1.0 + v.abs()));
                    assert!(res.objective <= previous.objective + 1e-9);
                }
                None => assert_eq!(res.status, LpStatus::Infeasible),
            }
            previous = res;
        }
    }
}

#[test]
fn warm_bound_changes_match_cold_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let lp = RandomLp::new(&mut rng);
        let mut solver = LpSolver::new(lp.model.clone());
        if solver.solve().status != LpStatus::Optimal {
            continue;
        }
        let mut model = lp.model.clone();
        for _ in 0..4 {
            let j = rng.gen_range(0..model.ncols());
            let (lo, up) = model.bounds(j);
            let v = if rng.gen_bool(0.5) { lo } else { up };
            model.set_bounds(j, v, v);
            solver.set_bounds(j, v, v);
            let warm = solver.solve();
            let cold = lp_solve(&model, None);
            assert_eq!(warm.status, cold.status);
            if cold.status == LpStatus::Optimal {
                assert!((warm.objective - cold.objective).abs() <= 1e-8 * (1.0 + cold.objective.abs()));
            }
        }
    }
}
