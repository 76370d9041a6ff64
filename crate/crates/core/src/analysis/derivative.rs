use std::collections::BTreeMap;

use serde::Serialize;

use super::vandermonde::{vandermonde_quantities, VandermondeQuantities};
use crate::error::{Error, Result};
use crate::problem::MinimaxSolution;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub mu: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub Delta: f64,
    pub V_minors: BTreeMap<String, f64>,
    pub g_prime_minus_one: f64,
    pub g_prime_plus_one: f64,
    pub En_prime: f64,
    pub log_derivative: f64,
    #[serde(skip)]
    pub quantities: VandermondeQuantities,
}

impl DerivativeReport {
    /// Relative mismatch between `E'/E` and the logarithmic-derivative route.
    pub fn route_mismatch(&self, error_level: f64) -> f64 {
        let a = self.En_prime / error_level;
        let scale = a
            .abs()
            .max(self.log_derivative.abs())
            .max(f64::MIN_POSITIVE);
        (a - self.log_derivative).abs() / scale
    }
}

fn sign(even: bool) -> f64 {
    if even {
        1.0
    } else {
        -1.0
    }
}

/// `E_n'(alpha)` from the alternation nodes, valid when the alternation set
/// is exactly `{-1 < u_k < ... < u_1 < alpha < v_1 < ... < v_l < 1}`.
#[allow(non_snake_case)]
pub fn error_derivative(sol: &MinimaxSolution) -> Result<DerivativeReport> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    let n = sol.n();
    let set = &sol.alternation;
    if !set.is_regular(n) {
        return Err(Error::Configuration(format!(
            "derivative formula needs the regular {}-point pattern with both endpoints \
             (found {} points, -1: {}, +1: {}); use finite differences here",
            n + 2,
            set.count,
            set.contains_minus_one,
            set.contains_plus_one
        )));
    }
    let q = vandermonde_quantities(set, sol.alpha())?;
    let dp = sol.poly.derivative();
    let slope_minus = dp.eval(-1.0) + 1.0;
    let slope_plus = dp.eval(1.0) - 1.0;
    let e = sol.error_level;

    let k_sign = sign(set.k.is_multiple_of(2));
    let n_sign = sign((n + 1).is_multiple_of(2));
    let last = q.log_minors.len() - 1;
    let ratio_minus = (q.log_minors[0] - q.log_minor_sum).exp();
    let ratio_plus = (q.log_minors[last] - q.log_minor_sum).exp();
    let en_prime = k_sign * (slope_minus * ratio_minus + n_sign * slope_plus * ratio_plus);

    let g_minus = slope_minus / e;
    let g_plus = slope_plus / e;
    let delta_d1 = (q.log_big_delta() + q.log_delta_plus).exp();
    let delta_dm1 = (q.log_big_delta() + q.log_delta_minus).exp();
    let log_derivative = k_sign * (g_minus * delta_d1 + n_sign * g_plus * delta_dm1);

    let V_minors = q
        .labels
        .iter()
        .cloned()
        .zip(q.minors())
        .collect::<BTreeMap<_, _>>();
    Ok(DerivativeReport {
        mu: q.mu(),
        delta_minus: q.delta_minus(),
        delta_plus: q.delta_plus(),
        Delta: q.big_delta(),
        V_minors,
        g_prime_minus_one: g_minus,
        g_prime_plus_one: g_plus,
        En_prime: en_prime,
        log_derivative,
        quantities: q,
    })
}

/// Central difference `(E(a + h) - E(a - h)) / 2h` through any solver.
pub fn central_difference(
    mut error_at: impl FnMut(f64) -> Result<f64>,
    alpha: f64,
    h: f64,
) -> Result<f64> {
    Ok((error_at(alpha + h)? - error_at(alpha - h)?) / (2.0 * h))
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

    fn energy(n: usize, a: f64) -> Result<f64> {
        Ok(solve(n, a).error_level)
    }

    #[test]
    fn degree_one_is_minus_alpha() {
        for a in [-0.8, -0.25, 0.0, 0.3, 0.9] {
            let r = error_derivative(&solve(1, a)).unwrap();
            assert!((r.En_prime + a).abs() < 1e-14, "{a}: {}", r.En_prime);
            assert!(r.route_mismatch((1.0 - a * a) / 2.0) < 1e-12);
        }
    }

    #[test]
    fn odd_degree_is_stationary_at_zero() {
        for n in [3, 5, 7] {
            let r = error_derivative(&solve(n, 0.0)).unwrap();
            assert!(r.En_prime.abs() < 1e-10, "n={n}: {}", r.En_prime);
        }
    }

    #[test]
    fn degree_five_matches_central_difference() {
        let r = error_derivative(&solve(5, 0.5)).unwrap();
        let fd = central_difference(|a| energy(5, a), 0.5, 1e-5).unwrap();
        assert!(
            (r.En_prime - fd).abs() <= 1e-5 * fd.abs(),
            "{} vs {fd}",
            r.En_prime
        );
    }

    #[test]
    fn report_is_positive_and_consistent() {
        let sol = solve(6, -0.2);
        let r = error_derivative(&sol).unwrap();
        assert!(r.mu > 0.0 && r.delta_minus > 0.0 && r.delta_plus > 0.0 && r.Delta > 0.0);
        let (dm, dp) = r.quantities.identity_defects();
        assert!(dm < 1e-10 && dp < 1e-10);
        assert!(r.route_mismatch(sol.error_level) < 1e-12);
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "mu",
            "delta_minus",
            "delta_plus",
            "Delta",
            "V_minors",
            "En_prime",
            "log_derivative",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert!(json["V_minors"].get("alpha").is_some());
        assert!(json["V_minors"].get("+1").is_some());
    }
}
