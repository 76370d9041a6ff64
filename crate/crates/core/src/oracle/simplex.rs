//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `min c^T x  s.t.  A x = b, x >= 0` and also returns the simplex
//! multipliers `y` of the equality rows at the optimum. The basis inverse is
//! rebuilt from the original data at every pivot, which keeps the long,
//! highly degenerate pivot sequences of the minimax LPs free of accumulated
//! rounding (the row count there is at most `n + 2`).

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-12;
const STALL_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 200_000;

/// Dense constraint matrix (with an artificial identity block appended for
/// phase one), objective row and basis index list.
#[derive(Debug, Clone)]
pub struct LpTableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`, rows normalized so that `rhs >= 0`.
    matrix: Vec<f64>,
    rhs: Vec<f64>,
    objective: Vec<f64>,
    /// Indices `>= cols` are artificial variables.
    basis: Vec<usize>,
    row_signs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// Multipliers of the equality rows, `y^T = c_B^T B^{-1}`.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

/// Gauss-Jordan inverse with partial pivoting of a row-major square matrix.
fn invert(mut m: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a * n + c].abs().total_cmp(&m[b * n + c].abs()))?;
        if m[piv * n + c].abs() < 1e-14 {
            return None;
        }
        if piv != c {
            for j in 0..n {
                m.swap(piv * n + j, c * n + j);
                inv.swap(piv * n + j, c * n + j);
            }
        }
        let d = m[c * n + c];
        for j in 0..n {
            m[c * n + j] /= d;
            inv[c * n + j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r * n + c];
                if f != 0.0 {
                    for j in 0..n {
                        m[r * n + j] -= f * m[c * n + j];
                        inv[r * n + j] -= f * inv[c * n + j];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl LpTableau {
    /// `a` is row-major `rows x cols`. Rows with negative `b` are negated.
    pub fn new(a: &[f64], b: &[f64], c: &[f64]) -> Result<Self> {
        let rows = b.len();
        let cols = c.len();
        if a.len() != rows * cols || rows == 0 {
            return Err(Error::Simplex("malformed (dimension mismatch)"));
        }
        let row_signs: Vec<f64> = b
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let matrix = a
            .chunks(cols)
            .zip(&row_signs)
            .flat_map(|(row, &s)| row.iter().map(move |&v| s * v))
            .collect();
        Ok(LpTableau {
            rows,
            cols,
            matrix,
            rhs: b.iter().zip(&row_signs).map(|(v, s)| v * s).collect(),
            objective: c.to_vec(),
            basis: (cols..cols + rows).collect(),
            row_signs,
        })
    }

    /// Column `j` of `[A | I]`.
    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.cols {
            (0..self.rows)
                .map(|i| self.matrix[i * self.cols + j])
                .collect()
        } else {
            let mut e = vec![0.0; self.rows];
            e[j - self.cols] = 1.0;
            e
        }
    }

    fn basis_inverse(&self) -> Result<Vec<f64>> {
        let r = self.rows;
        let mut b = vec![0.0; r * r];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                b[i * r + k] = v;
            }
        }
        invert(b, r).ok_or(Error::Simplex("numerically singular at a basis"))
    }

    fn mul(inv: &[f64], r: usize, v: &[f64]) -> Vec<f64> {
        (0..r)
            .map(|i| (0..r).map(|k| inv[i * r + k] * v[k]).sum())
            .collect()
    }

    /// Phase loop over variables `0..limit` with cost vector `cost`.
    fn run(
        &mut self,
        cost: &[f64],
        limit: usize,
        floor: f64,
        pivots: &mut usize,
    ) -> Result<Vec<f64>> {
        let r = self.rows;
        let mut best = f64::INFINITY;
        let mut stalled = 0usize;
        loop {
            let inv = self.basis_inverse()?;
            let xb = Self::mul(&inv, r, &self.rhs);
            let value: f64 = (0..r).map(|i| cost[self.basis[i]] * xb[i]).sum();
            // y^T = c_B^T B^{-1}
            let y: Vec<f64> = (0..r)
                .map(|k| (0..r).map(|i| cost[self.basis[i]] * inv[i * r + k]).sum())
                .collect();
            let reduced = |j: usize| {
                let col_dot: f64 = if j < self.cols {
                    (0..r).map(|i| y[i] * self.matrix[i * self.cols + j]).sum()
                } else {
                    y[j - self.cols]
                };
                cost[j] - col_dot
            };
            // Most negative reduced cost while the objective improves; after a
            // run of stalled (degenerate) pivots switch to Bland's smallest-index
            // rule, which cannot cycle, until the objective moves again.
            if value < best - 1e-15 * best.abs().max(1.0) {
                best = value;
                stalled = 0;
            } else {
                stalled += 1;
            }
            let bland = stalled >= STALL_LIMIT;
            let candidates = (0..limit).filter(|&j| !self.basis.contains(&j));
            let enter = if bland {
                candidates.into_iter().find(|&j| reduced(j) < -COST_TOL)
            } else {
                candidates
                    .map(|j| (j, reduced(j)))
                    .filter(|&(_, d)| d < -COST_TOL)
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(j, _)| j)
            };
            let Some(enter) = enter.filter(|_| value > floor) else {
                return Ok(y);
            };
            let d = Self::mul(&inv, r, &self.column(enter));
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..r {
                if d[i] > PIVOT_TOL {
                    let ratio = xb[i].max(0.0) / d[i];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Simplex("unbounded"));
            };
            self.basis[row] = enter;
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Simplex("not terminating"));
            }
        }
    }

    pub fn solve(mut self) -> Result<LpSolution> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = 0;

        let mut phase1 = vec![0.0; cols + rows];
        phase1[cols..].iter_mut().for_each(|v| *v = 1.0);
        let scale = self.rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        // Stop phase one once the artificials are at rounding level; beyond
        // that the pivots only shuffle noise.
        self.run(&phase1, cols + rows, 1e-13 * scale, &mut pivots)?;
        let inv = self.basis_inverse()?;
        let xb = Self::mul(&inv, rows, &self.rhs);
        let infeas: f64 = (0..rows)
            .filter(|&i| self.basis[i] >= cols)
            .map(|i| xb[i])
            .sum();
        if infeas > 1e-9 * scale {
            return Err(Error::Simplex("infeasible"));
        }
        // Swap zero-valued artificials for structural columns where possible.
        for i in 0..rows {
            if self.basis[i] < cols {
                continue;
            }
            let inv = self.basis_inverse()?;
            let swap = (0..cols).find(|&j| {
                !self.basis.contains(&j)
                    && Self::mul(&inv, rows, &self.column(j))[i].abs() > PIVOT_TOL
            });
            if let Some(j) = swap {
                self.basis[i] = j;
                pivots += 1;
            }
        }

        let mut phase2 = self.objective.clone();
        phase2.resize(cols + rows, 0.0);
        let y = self.run(&phase2, cols, f64::NEG_INFINITY, &mut pivots)?;

        let inv = self.basis_inverse()?;
        let xb = Self::mul(&inv, rows, &self.rhs);
        let mut x = vec![0.0; cols];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < cols {
                x[bi] = xb[i].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        let duals = y.iter().zip(&self.row_signs).map(|(v, s)| v * s).collect();
        Ok(LpSolution {
            objective,
            x,
            duals,
            pivots,
        })
    }
}

/// Convenience wrapper.
pub fn simplex_solve(tableau: LpTableau) -> Result<LpSolution> {
    tableau.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounded_variable() {
        // min E, E >= 0.3, E >= -0.3 with E = s1 + 0.3 = s2 - 0.3 in slack form:
        // variables (E, s1, s2): E - s1 = 0.3, E - s2 = -0.3.
        let a = [1.0, -1.0, 0.0, 1.0, 0.0, -1.0];
        let sol = LpTableau::new(&a, &[0.3, -0.3], &[1.0, 0.0, 0.0])
            .unwrap()
            .solve()
            .unwrap();
        assert!((sol.objective - 0.3).abs() < 1e-15);
        assert!((sol.x[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn degenerate_ties_terminate() {
        // Two identical constraints tie in every ratio test.
        let a = [1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let sol = LpTableau::new(&a, &[1.0, 1.0], &[-1.0, -2.0, 0.0, 0.0])
            .unwrap()
            .solve()
            .unwrap();
        assert!((sol.objective + 2.0).abs() < 1e-12);
    }

    #[test]
    fn classic_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let a = [
            0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0, //
            0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0,
        ];
        let c = [-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0];
        let sol = LpTableau::new(&a, &[0.0, 0.0, 1.0], &c)
            .unwrap()
            .solve()
            .unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-12, "{}", sol.objective);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = LpTableau::new(&[1.0, 1.0], &[1.0, -1.0], &[1.0])
            .unwrap()
            .solve();
        assert!(matches!(inf, Err(Error::Simplex("infeasible"))));
        let unb = LpTableau::new(&[1.0, -1.0], &[1.0], &[-1.0, 0.0])
            .unwrap()
            .solve();
        assert!(matches!(unb, Err(Error::Simplex("unbounded"))));
    }

    #[test]
    fn duals_satisfy_strong_duality() {
        let a = [1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0];
        let b = [4.0, 6.0];
        let sol = LpTableau::new(&a, &b, &[-1.0, -1.0, 0.0, 0.0])
            .unwrap()
            .solve()
            .unwrap();
        let yb: f64 = sol.duals.iter().zip(b).map(|(y, b)| y * b).sum();
        assert!((yb - sol.objective).abs() < 1e-12);
        // Same problem with the second row negated.
        let a2 = [1.0, 2.0, 1.0, 0.0, -3.0, -1.0, 0.0, -1.0];
        let b2 = [4.0, -6.0];
        let sol2 = LpTableau::new(&a2, &b2, &[-1.0, -1.0, 0.0, 0.0])
            .unwrap()
            .solve()
            .unwrap();
        let yb2: f64 = sol2.duals.iter().zip(b2).map(|(y, b)| y * b).sum();
        assert!((yb2 - sol2.objective).abs() < 1e-12);
        assert!((sol2.objective - sol.objective).abs() < 1e-12);
    }
}
