//! The `2n + 1` extremal equations in the monomial coefficients, the error
//! level and the interior alternation points, and Newton's method on them.

use nalgebra::{DMatrix, DVector};

use crate::analysis::{classify_extrema, DEFAULT_TOL_ENDPOINT, DEFAULT_TOL_LEVEL};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::problem::MinimaxSolution;
use crate::remez::{find_extrema, ReferenceSet, RemezConfig};

pub const NEWTON_TOL: f64 = 1e-13;
pub const MAX_CONDITION: f64 = 1e12;
const NEWTON_MAX_STEPS: usize = 25;

/// Unknowns `(c_0, ..., c_n, E, u_k, ..., u_1, v_1, ..., v_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSystemState {
    pub n: usize,
    pub alpha: f64,
    pub k: usize,
    pub l: usize,
    pub unknowns: Vec<f64>,
}

impl ExtremalSystemState {
    pub fn from_solution(sol: &MinimaxSolution) -> Result<Self> {
        let n = sol.n();
        let set = &sol.alternation;
        if !set.is_regular(n) || set.k + set.l + 1 != n {
            return Err(Error::Configuration(format!(
                "extremal system needs the regular {}-point pattern with both endpoints",
                n + 2
            )));
        }
        let mut unknowns = sol.poly.to_monomial().coeffs().to_vec();
        unknowns.push(sol.error_level);
        unknowns.extend_from_slice(&set.points[1..set.points.len() - 1]);
        unknowns.remove(n + 2 + set.k); // alpha itself is a parameter
        Ok(ExtremalSystemState {
            n,
            alpha: sol.alpha(),
            k: set.k,
            l: set.l,
            unknowns,
        })
    }

    pub fn poly(&self) -> Polynomial {
        Polynomial::monomial(self.unknowns[..=self.n].to_vec())
    }

    pub fn error_level(&self) -> f64 {
        self.unknowns[self.n + 1]
    }

    /// All `n + 2` nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        let inner = &self.unknowns[self.n + 2..];
        let mut nodes = Vec::with_capacity(self.n + 2);
        nodes.push(-1.0);
        nodes.extend_from_slice(&inner[..self.k]);
        nodes.push(self.alpha);
        nodes.extend_from_slice(&inner[self.k..]);
        nodes.push(1.0);
        nodes
    }

    fn ordered(&self) -> bool {
        self.nodes().windows(2).all(|w| w[0] < w[1])
    }

    /// Sign of `e = f - p` at node `i` of [`Self::nodes`].
    fn node_sign(&self, i: usize) -> f64 {
        let d = i as isize - (self.k as isize + 1);
        if d % 2 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Column of node `i` in the Jacobian, `None` for the fixed nodes.
    fn node_column(&self, i: usize) -> Option<usize> {
        let n = self.n;
        if i == 0 || i == n + 1 || i == self.k + 1 {
            None
        } else if i <= self.k {
            Some(n + 2 + i - 1)
        } else {
            Some(n + 2 + i - 2)
        }
    }

    pub fn residual(&self) -> Vec<f64> {
        let p = self.poly();
        let dp = p.derivative();
        let e = self.error_level();
        let nodes = self.nodes();
        let mut f = Vec::with_capacity(2 * self.n + 1);
        for (i, &x) in nodes.iter().enumerate() {
            f.push(p.eval(x) - (x - self.alpha).abs() + self.node_sign(i) * e);
        }
        for (i, &x) in nodes.iter().enumerate() {
            if self.node_column(i).is_some() {
                let s = if x < self.alpha { -1.0 } else { 1.0 };
                f.push(dp.eval(x) - s);
            }
        }
        f
    }

    pub fn jacobian(&self) -> DMatrix<f64> {
        let n = self.n;
        let dim = 2 * n + 1;
        let p = self.poly();
        let dp = p.derivative();
        let d2p = dp.derivative();
        let nodes = self.nodes();
        let mut j = DMatrix::<f64>::zeros(dim, dim);
        for (i, &x) in nodes.iter().enumerate() {
            let mut pow = 1.0;
            for c in 0..=n {
                j[(i, c)] = pow;
                pow *= x;
            }
            j[(i, n + 1)] = self.node_sign(i);
            if let Some(col) = self.node_column(i) {
                let s = if x < self.alpha { -1.0 } else { 1.0 };
                j[(i, col)] = dp.eval(x) - s;
            }
        }
        let mut row = n + 2;
        for (i, &x) in nodes.iter().enumerate() {
            let Some(col) = self.node_column(i) else {
                continue;
            };
            let mut pow = 1.0;
            for c in 1..=n {
                j[(row, c)] = c as f64 * pow;
                pow *= x;
            }
            j[(row, col)] = d2p.eval(x);
            row += 1;
        }
        j
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn condition_number(j: &DMatrix<f64>) -> f64 {
    let sv = j.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Newton iterations on the extremal system, started from a converged
/// exchange result with the regular `n + 2` point pattern.
pub fn newton_refine(sol: &MinimaxSolution) -> Result<MinimaxSolution> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    let refuse = |reason: String| Error::RefinementRefused {
        reason,
        original: Box::new(sol.clone()),
    };
    let n = sol.n();
    let set = &sol.alternation;
    if set.count == n + 3 {
        return Err(refuse(format!(
            "{} alternation points: the extremal system is singular at this configuration",
            n + 3
        )));
    }
    // On a V-shape leg one endpoint has left the set; the system is the
    // limit of the singular tip configuration and is not set up there.
    if !set.contains_minus_one || !set.contains_plus_one {
        return Err(refuse(format!(
            "endpoint {} is not an alternation point (alpha lies on a V-shape leg)",
            if set.contains_minus_one { "+1" } else { "-1" }
        )));
    }
    let mut state = ExtremalSystemState::from_solution(sol)?;
    let mut f = state.residual();
    let mut steps = 0;
    while inf_norm(&f) > NEWTON_TOL {
        if steps == NEWTON_MAX_STEPS {
            return Err(refuse(format!(
                "residual {:e} after {steps} Newton steps",
                inf_norm(&f)
            )));
        }
        let j = state.jacobian();
        let cond = condition_number(&j);
        if cond.is_nan() || cond > MAX_CONDITION {
            return Err(refuse(format!("Jacobian condition estimate {cond:e}")));
        }
        let rhs = DVector::from_vec(f.clone());
        let delta = j
            .lu()
            .solve(&rhs)
            .ok_or_else(|| refuse("singular Jacobian".into()))?;
        let mut next = state.clone();
        for (u, d) in next.unknowns.iter_mut().zip(delta.iter()) {
            *u -= d;
        }
        if !next.ordered() {
            return Err(refuse("Newton step broke the node ordering".into()));
        }
        let next_f = next.residual();
        // Stop once the residual no longer decreases: we are at rounding level.
        if inf_norm(&next_f) >= inf_norm(&f) && steps > 0 {
            break;
        }
        state = next;
        f = next_f;
        steps += 1;
    }
    if inf_norm(&f) > NEWTON_TOL {
        return Err(refuse(format!("residual stalled at {:e}", inf_norm(&f))));
    }

    let poly = state.poly().to_chebyshev();
    let e = state.error_level();
    let cfg = RemezConfig::default();
    let extrema = find_extrema(&sol.instance, &poly, &cfg);
    let max_error = extrema.iter().map(|c| c.e.abs()).fold(0.0, f64::max);
    let alternation = classify_extrema(
        &sol.instance,
        max_error,
        &extrema,
        DEFAULT_TOL_LEVEL,
        DEFAULT_TOL_ENDPOINT,
    )?;
    Ok(MinimaxSolution {
        instance: sol.instance,
        poly,
        error_level: e,
        alternation,
        converged: true,
        residual: ((max_error - e) / e).abs(),
        reference: ReferenceSet {
            nodes: state.nodes(),
            alpha: sol.alpha(),
        },
    })
}

/// Number of Newton steps a refinement took (0 when already at tolerance).
pub fn newton_steps(sol: &MinimaxSolution) -> Result<usize> {
    let mut state = ExtremalSystemState::from_solution(sol)?;
    let mut steps = 0;
    while inf_norm(&state.residual()) > NEWTON_TOL && steps < NEWTON_MAX_STEPS {
        let delta = state
            .jacobian()
            .lu()
            .solve(&DVector::from_vec(state.residual()))
            .ok_or(Error::Configuration("singular Jacobian".into()))?;
        for (u, d) in state.unknowns.iter_mut().zip(delta.iter()) {
            *u -= d;
        }
        steps += 1;
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::CheckmarkInstance;
    use crate::remez::remez_solve;

    fn solve(n: usize, a: f64) -> MinimaxSolution {
        remez_solve(
            &CheckmarkInstance::new(n, a).unwrap(),
            &RemezConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn degree_one_system() {
        let sol = solve(1, 0.5);
        let st = ExtremalSystemState::from_solution(&sol).unwrap();
        assert_eq!(st.unknowns.len(), 3);
        for (u, w) in st.unknowns.iter().zip([0.625, -0.5, 0.375]) {
            assert!((u - w).abs() < 1e-14);
        }
        let exact = ExtremalSystemState {
            unknowns: vec![0.625, -0.5, 0.375],
            ..st.clone()
        };
        assert!(inf_norm(&exact.residual()) < 1e-16);
        assert!(newton_steps(&sol).unwrap() <= 1);
        let refined = newton_refine(&sol).unwrap();
        assert!((refined.error_level - 0.375).abs() < 1e-15);
    }

    #[test]
    fn refined_residual_is_small() {
        for (n, a) in [(3, 0.1), (4, -0.6), (5, 0.5), (6, 0.93)] {
            let sol = solve(n, a);
            let refined = newton_refine(&sol).unwrap();
            let st = ExtremalSystemState::from_solution(&refined).unwrap();
            assert!(inf_norm(&st.residual()) <= NEWTON_TOL, "n={n} a={a}");
            assert!((refined.error_level - sol.error_level).abs() < 1e-12);
        }
    }

    #[test]
    fn refused_near_a_tip() {
        let sol = solve(5, 0.7975);
        match newton_refine(&sol) {
            Err(Error::RefinementRefused { original, .. }) => {
                assert_eq!(original.error_level, sol.error_level);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        let tip = solve(2, 0.0);
        assert!(matches!(
            newton_refine(&tip),
            Err(Error::RefinementRefused { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sol = solve(4, 0.3);
        let st = ExtremalSystemState::from_solution(&sol).unwrap();
        let j = st.jacobian();
        let h = 1e-7;
        for c in 0..st.unknowns.len() {
            let mut plus = st.clone();
            let mut minus = st.clone();
            plus.unknowns[c] += h;
            minus.unknowns[c] -= h;
            let (fp, fm) = (plus.residual(), minus.residual());
            for r in 0..fp.len() {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                assert!(
                    (fd - j[(r, c)]).abs() < 1e-6,
                    "({r},{c}) {fd} vs {}",
                    j[(r, c)]
                );
            }
        }
    }
}
