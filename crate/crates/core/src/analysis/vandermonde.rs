//! Vandermonde minors of a regular alternation set, kept in log space.

use super::AlternationSet;
use crate::error::{Error, Result};

/// Label of an alternation node in serialized reports.
pub fn node_labels(set: &AlternationSet) -> Vec<String> {
    let mut labels = vec!["-1".to_string()];
    labels.extend((1..=set.k).rev().map(|j| format!("u{j}")));
    labels.push("alpha".into());
    labels.extend((1..=set.l).map(|j| format!("v{j}")));
    labels.push("+1".into());
    labels
}

/// `log prod_{i<j} (x_j - x_i)` for strictly increasing nodes.
pub fn log_vandermonde(nodes: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, &xi) in nodes.iter().enumerate() {
        for &xj in &nodes[i + 1..] {
            acc += (xj - xi).ln();
        }
    }
    acc
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeQuantities {
    pub log_mu: f64,
    pub log_delta_minus: f64,
    pub log_delta_plus: f64,
    /// `log V(xi)` for every node, in increasing node order.
    pub log_minors: Vec<f64>,
    /// `log` of the sum of all minors.
    pub log_minor_sum: f64,
    pub labels: Vec<String>,
}

impl VandermondeQuantities {
    pub fn mu(&self) -> f64 {
        self.log_mu.exp()
    }

    pub fn delta_minus(&self) -> f64 {
        self.log_delta_minus.exp()
    }

    pub fn delta_plus(&self) -> f64 {
        self.log_delta_plus.exp()
    }

    pub fn big_delta(&self) -> f64 {
        self.log_big_delta().exp()
    }

    pub fn log_big_delta(&self) -> f64 {
        self.log_mu - self.log_minor_sum
    }

    pub fn minors(&self) -> Vec<f64> {
        self.log_minors.iter().map(|v| v.exp()).collect()
    }

    /// Relative defects of `V(-1) = mu d_1` and `V(1) = mu d_-1`.
    pub fn identity_defects(&self) -> (f64, f64) {
        let last = self.log_minors.len() - 1;
        let lhs_m = self.log_minors[0];
        let rhs_m = self.log_mu + self.log_delta_plus;
        let lhs_p = self.log_minors[last];
        let rhs_p = self.log_mu + self.log_delta_minus;
        (
            (lhs_m - rhs_m).exp_m1().abs(),
            (lhs_p - rhs_p).exp_m1().abs(),
        )
    }
}

/// Minors `V(xi)` of the `n + 2` nodes with `xi` removed, the interior
/// Vandermonde `mu`, the endpoint distance products and `Delta`.
pub fn vandermonde_quantities(set: &AlternationSet, alpha: f64) -> Result<VandermondeQuantities> {
    let m = set.points.len();
    let regular = set.contains_minus_one
        && set.contains_plus_one
        && m == set.k + set.l + 3
        && set.points.contains(&alpha)
        && set.points.windows(2).all(|w| w[0] < w[1]);
    if !regular {
        return Err(Error::Configuration(
            "Vandermonde quantities need n + 2 distinct nodes containing -1, alpha and 1".into(),
        ));
    }
    let nodes = &set.points;
    let interior = &nodes[1..m - 1];
    let log_minors: Vec<f64> = (0..m)
        .map(|skip| {
            let rest: Vec<f64> = nodes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect();
            log_vandermonde(&rest)
        })
        .collect();
    let log_minor_sum = log_sum_exp(&log_minors);
    Ok(VandermondeQuantities {
        log_mu: log_vandermonde(interior),
        log_delta_minus: interior.iter().map(|x| (x + 1.0).ln()).sum(),
        log_delta_plus: interior.iter().map(|x| (1.0 - x).ln()).sum(),
        log_minors,
        log_minor_sum,
        labels: node_labels(set),
    })
}
