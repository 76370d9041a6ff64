use serde::Serialize;

use super::simplex::LpTableau;
use crate::error::{Error, Result};
use crate::poly::{chebyshev_extrema, Polynomial};
use crate::problem::CheckmarkInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Discrete minimax value; never above the continuous `E_n(alpha)`.
    pub e_lower: f64,
    pub poly: Polynomial,
    pub grid_size: usize,
}

#[derive(Serialize)]
struct OracleJson<'a> {
    #[serde(rename = "E_lower")]
    e_lower: f64,
    coeffs_mono: &'a [f64],
    grid_size: usize,
}

impl OracleSolution {
    pub fn to_json(&self) -> serde_json::Value {
        let mono = self.poly.to_monomial();
        serde_json::to_value(OracleJson {
            e_lower: self.e_lower,
            coeffs_mono: mono.coeffs(),
            grid_size: self.grid_size,
        })
        .expect("plain data serializes")
    }
}

/// Chebyshev grid of `grid_size` points with `alpha` and `+-1` merged in.
pub fn oracle_grid(alpha: f64, grid_size: usize) -> Vec<f64> {
    let mut xs = chebyshev_extrema(grid_size.max(2) - 1);
    xs.push(alpha);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Solves `min E` subject to `|f(x_i) - p(x_i)| <= E` on the grid.
///
/// The LP is solved in its dual form (`n + 2` equality rows, two
/// nonnegative weights per grid point); the primal coefficients and level
/// are read off the simplex multipliers.
pub fn discrete_minimax(inst: &CheckmarkInstance, grid_size: usize) -> Result<OracleSolution> {
    let n = inst.n;
    if grid_size < 4 * (n + 2) {
        return Err(Error::Configuration(format!(
            "grid of {grid_size} points is too coarse for degree {n} (need {})",
            4 * (n + 2)
        )));
    }
    let xs = oracle_grid(inst.alpha, grid_size);
    let m = xs.len();
    let rows = n + 2;
    let cols = 2 * m;
    let mut a = vec![0.0; rows * cols];
    let mut cost = vec![0.0; cols];
    let mut t = vec![0.0; n + 1];
    for (i, &x) in xs.iter().enumerate() {
        t[0] = 1.0;
        if n >= 1 {
            t[1] = x;
        }
        for j in 2..=n {
            t[j] = 2.0 * x * t[j - 1] - t[j - 2];
        }
        for j in 0..=n {
            a[j * cols + i] = t[j];
            a[j * cols + m + i] = -t[j];
        }
        a[(n + 1) * cols + i] = 1.0;
        a[(n + 1) * cols + m + i] = 1.0;
        let f = inst.eval(x);
        cost[i] = -f;
        cost[m + i] = f;
    }
    let mut b = vec![0.0; rows];
    b[n + 1] = 1.0;
    let sol = LpTableau::new(&a, &b, &cost)?.solve()?;
    let coeffs: Vec<f64> = sol.duals[..=n].iter().map(|y| -y).collect();
    Ok(OracleSolution {
        e_lower: -sol.objective,
        poly: Polynomial::chebyshev(coeffs),
        grid_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, a: f64) -> CheckmarkInstance {
        CheckmarkInstance::new(n, a).unwrap()
    }

    #[test]
    fn best_constant_on_coarse_grid() {
        let s = discrete_minimax(&inst(0, 0.0), 8).unwrap();
        assert!((s.e_lower - 0.5).abs() < 1e-12);
        assert!((s.poly.eval(0.3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn best_constant_dense() {
        let s = discrete_minimax(&inst(0, 0.3), 4096).unwrap();
        assert!((s.e_lower - 0.65).abs() < 1e-6);
    }

    #[test]
    fn degree_one_dense() {
        let s = discrete_minimax(&inst(1, 0.5), 4096).unwrap();
        assert!((s.e_lower - 0.375).abs() < 1e-6);
        let m = s.poly.to_monomial();
        assert!((m.coeffs()[0] - 0.625).abs() < 1e-6);
        assert!((m.coeffs()[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn degree_two_dense() {
        let s = discrete_minimax(&inst(2, 0.0), 8192).unwrap();
        assert!((s.e_lower - 0.125).abs() < 1e-6);
        let json = s.to_json();
        assert_eq!(json["grid_size"], 8192);
        assert_eq!(json["coeffs_mono"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(discrete_minimax(&inst(3, 0.0), 10).is_err());
    }
}
