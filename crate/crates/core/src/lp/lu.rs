//! Dense LU with partial pivoting for small basis kernels.

/// `P·A = L·U` stored in one row-major matrix; `perm[k]` is the source row of
/// row `k` of `P·A`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

/// Factorization failed; the listed columns are dependent on earlier ones and
/// the listed rows received no pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Singular {
    pub dependent_cols: Vec<usize>,
    pub unused_rows: Vec<usize>,
}

impl DenseLu {
    pub fn factor(n: usize, mut a: Vec<f64>, pivot_tol: f64) -> Result<Self, Singular> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rank = 0;
        let mut dependent = Vec::new();
        for k in 0..n {
            let (best, mag) = (rank..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((rank, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if rank == n || mag < pivot_tol {
                dependent.push(k);
                continue;
            }
            if best != rank {
                for c in 0..n {
                    a.swap(best * n + c, rank * n + c);
                }
                perm.swap(best, rank);
            }
            let piv = a[rank * n + k];
            for i in rank + 1..n {
                let f = a[i * n + k] / piv;
                if f == 0.0 {
                    continue;
                }
                a[i * n + k] = f;
                for c in k + 1..n {
                    a[i * n + c] -= f * a[rank * n + c];
                }
            }
            rank += 1;
        }
        if dependent.is_empty() {
            Ok(Self { n, lu: a, perm })
        } else {
            Err(Singular { dependent_cols: dependent, unused_rows: perm[rank..].to_vec() })
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A u = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&r| b[r]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&y[i + 1..]).map(|(u, v)| u * v).sum();
            y[i] = (y[i] - s) / row[i];
        }
        b.copy_from_slice(&y);
    }

    /// Solves `Aᵀ y = c` in place.
    pub fn solve_transpose(&self, c: &mut [f64]) {
        let n = self.n;
        let mut w = c.to_vec();
        for i in 0..n {
            w[i] /= self.lu[i * n + i];
            let wi = w[i];
            if wi != 0.0 {
                for k in i + 1..n {
                    w[k] -= self.lu[i * n + k] * wi;
                }
            }
        }
        for i in (0..n).rev() {
            let wi = w[i];
            if wi != 0.0 {
                for k in 0..i {
                    w[k] -= self.lu[i * n + k] * wi;
                }
            }
        }
        for (k, &r) in self.perm.iter().enumerate() {
            c[r] = w[k];
        }
    }
}
