use serde::Serialize;

use crate::error::Result;
use crate::extremal::ExtremalSystemState;
use crate::problem::MinimaxSolution;

/// Block determinant identity `det J = det A * prod p''(u_j) * prod p''(v_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub det_j: f64,
    pub det_a: f64,
    pub second_derivative_product: f64,
    pub relative_mismatch: f64,
}

pub fn jacobian_identity_check(sol: &MinimaxSolution) -> Result<JacobianCheck> {
    let state = ExtremalSystemState::from_solution(sol)?;
    let n = state.n;
    let j = state.jacobian();
    let det_j = j.clone().lu().determinant();
    let det_a = j
        .view((0, 0), (n + 2, n + 2))
        .into_owned()
        .lu()
        .determinant();
    let d2p = state.poly().derivative().derivative();
    let second_derivative_product: f64 = state.unknowns[n + 2..]
        .iter()
        .map(|&x| d2p.eval(x))
        .product();
    let rhs = det_a * second_derivative_product;
    let relative_mismatch = (det_j - rhs).abs() / det_j.abs().max(f64::MIN_POSITIVE);
    Ok(JacobianCheck {
        det_j,
        det_a,
        second_derivative_product,
        relative_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::CheckmarkInstance;
    use crate::remez::{remez_solve, RemezConfig};

    fn solve(n: usize, a: f64) -> MinimaxSolution {
        remez_solve(
            &CheckmarkInstance::new(n, a).unwrap(),
            &RemezConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn degree_one_has_empty_product() {
        let c = jacobian_identity_check(&solve(1, 0.5)).unwrap();
        assert_eq!(c.second_derivative_product, 1.0);
        assert_eq!(c.det_j, c.det_a);
        assert_eq!(c.relative_mismatch, 0.0);
    }

    #[test]
    fn degree_five_identity() {
        let c = jacobian_identity_check(&solve(5, 0.5)).unwrap();
        assert!(c.relative_mismatch <= 1e-8, "{c:?}");
        assert!(c.det_a != 0.0);
    }
}
