//! Dense univariate polynomials in either the Chebyshev (first kind) or the
//! monomial basis.

use serde::{Deserialize, Serialize};

/// Which basis the coefficient vector of a [`Polynomial`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
    Monomial,
}

/// A polynomial `sum_j coeffs[j] * phi_j(x)` where `phi_j` is `T_j` or `x^j`.
///
/// The coefficient list is never empty; the degree bound is `coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial")]
pub struct Polynomial {
    basis: Basis,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPolynomial {
    basis: Basis,
    coeffs: Vec<f64>,
}

impl TryFrom<RawPolynomial> for Polynomial {
    type Error = String;

    fn try_from(raw: RawPolynomial) -> Result<Self, Self::Error> {
        if raw.coeffs.is_empty() {
            return Err("polynomial coefficient list must be non-empty".into());
        }
        Ok(Polynomial {
            basis: raw.basis,
            coeffs: raw.coeffs,
        })
    }
}

impl Polynomial {
    /// Builds a polynomial; an empty coefficient list is read as the zero constant.
    pub fn new(basis: Basis, coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Polynomial { basis, coeffs }
    }

    pub fn chebyshev(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::Chebyshev, coeffs)
    }

    pub fn monomial(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::Monomial, coeffs)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates the polynomial. Chebyshev series go through Clenshaw's
    /// recurrence, monomial ones through Horner's rule.
    pub fn eval(&self, x: f64) -> f64 {
        match self.basis {
            Basis::Monomial => self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            Basis::Chebyshev => clenshaw(&self.coeffs, x),
        }
    }

    /// Exact derivative in the same basis. The degree bound drops by one
    /// (a constant stays a one-element zero polynomial).
    pub fn derivative(&self) -> Polynomial {
        let n = self.degree_bound();
        if n == 0 {
            return Polynomial::new(self.basis, vec![0.0]);
        }
        let coeffs = match self.basis {
            Basis::Monomial => (1..=n).map(|j| j as f64 * self.coeffs[j]).collect(),
            Basis::Chebyshev => {
                // b_{k-1} = b_{k+1} + 2k a_k, then halve b_0.
                let a = &self.coeffs;
                let mut b = vec![0.0; n + 2];
                for k in (1..=n).rev() {
                    b[k - 1] = b[k + 1] + 2.0 * k as f64 * a[k];
                }
                b[0] *= 0.5;
                b.truncate(n);
                b
            }
        };
        Polynomial::new(self.basis, coeffs)
    }

    /// Coefficient of `x^n` where `n` is the degree bound, whatever the basis.
    pub fn leading_monomial_coeff(&self) -> f64 {
        let n = self.degree_bound();
        let last = self.coeffs[n];
        match self.basis {
            Basis::Monomial => last,
            Basis::Chebyshev if n == 0 => last,
            Basis::Chebyshev => last * 2f64.powi(n as i32 - 1),
        }
    }

    pub fn to_monomial(&self) -> Polynomial {
        match self.basis {
            Basis::Monomial => self.clone(),
            Basis::Chebyshev => Polynomial::monomial(chebyshev_to_monomial(&self.coeffs)),
        }
    }

    pub fn to_chebyshev(&self) -> Polynomial {
        match self.basis {
            Basis::Chebyshev => self.clone(),
            Basis::Monomial => Polynomial::chebyshev(monomial_to_chebyshev(&self.coeffs)),
        }
    }

    /// The polynomial `q(x) = p(-x)`.
    pub fn reflect(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| if j % 2 == 1 { -c } else { c })
            .collect();
        Polynomial::new(self.basis, coeffs)
    }
}

fn clenshaw(a: &[f64], x: f64) -> f64 {
    if a.len() == 1 {
        return a[0];
    }
    let two_x = 2.0 * x;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ak in a[1..].iter().rev() {
        let tmp = two_x * b1 - b2 + ak;
        b2 = b1;
        b1 = tmp;
    }
    x * b1 - b2 + a[0]
}

fn chebyshev_to_monomial(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut out = vec![0.0; n + 1];
    // t_prev = T_{k-1}, t_cur = T_k as monomial vectors.
    let mut t_prev = vec![0.0; n + 1];
    let mut t_cur = vec![0.0; n + 1];
    t_cur[0] = 1.0;
    out[0] += a[0];
    for (k, &ak) in a.iter().enumerate().skip(1) {
        let mut t_next = vec![0.0; n + 1];
        if k == 1 {
            t_next[1] = 1.0;
        } else {
            for j in 0..n {
                t_next[j + 1] += 2.0 * t_cur[j];
            }
            for j in 0..=n {
                t_next[j] -= t_prev[j];
            }
        }
        for j in 0..=n {
            out[j] += ak * t_next[j];
        }
        t_prev = std::mem::replace(&mut t_cur, t_next);
    }
    out
}

fn monomial_to_chebyshev(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    let mut out = vec![0.0; n + 1];
    // xk holds x^k in the Chebyshev basis.
    let mut xk = vec![0.0; n + 1];
    xk[0] = 1.0;
    for (k, &ck) in c.iter().enumerate() {
        if k > 0 {
            let mut next = vec![0.0; n + 1];
            for j in 0..k {
                let v = xk[j];
                if v == 0.0 {
                    continue;
                }
                if j == 0 {
                    next[1] += v;
                } else {
                    next[j + 1] += 0.5 * v;
                    next[j - 1] += 0.5 * v;
                }
            }
            xk = next;
        }
        for j in 0..=k {
            out[j] += ck * xk[j];
        }
    }
    out
}

/// `n + 1` Chebyshev extreme points `cos(j pi / n)`, sorted ascending.
pub fn chebyshev_extrema(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    let mut pts: Vec<f64> = (0..=n)
        .map(|j| -(std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    pts[0] = -1.0;
    pts[n] = 1.0;
    if n.is_multiple_of(2) {
        pts[n / 2] = 0.0;
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_quadratic_value() {
        let p = Polynomial::monomial(vec![0.125, 0.0, 1.0]);
        assert_eq!(p.eval(0.5), 0.375);
    }

    #[test]
    fn chebyshev_constant_and_t2() {
        let c = Polynomial::chebyshev(vec![1.0]);
        assert_eq!(c.eval(0.37), 1.0);
        assert_eq!(c.eval(-5.0), 1.0);
        let t2 = Polynomial::chebyshev(vec![0.0, 0.0, 1.0]);
        assert!((t2.eval(0.3) + 0.82).abs() < 1e-15);
    }

    #[test]
    fn monomial_derivatives() {
        let lin = Polynomial::monomial(vec![0.625, -0.5]);
        assert_eq!(lin.derivative().coeffs(), &[-0.5]);
        let q = Polynomial::monomial(vec![0.125, 0.0, 1.0]);
        assert_eq!(q.derivative().coeffs(), &[0.0, 2.0]);
        assert_eq!(q.derivative().derivative().coeffs(), &[2.0]);
    }

    #[test]
    fn chebyshev_derivative_matches_monomial() {
        let p = Polynomial::chebyshev(vec![0.3, -1.2, 0.7, 0.25, -0.1]);
        let dp = p.derivative();
        let dm = p.to_monomial().derivative();
        for &x in &[-1.0, -0.3, 0.0, 0.8, 1.7] {
            assert!((dp.eval(x) - dm.eval(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn leading_coefficient() {
        let p = Polynomial::chebyshev(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.leading_monomial_coeff(), 4.0);
        assert_eq!(p.to_monomial().coeffs(), &[0.0, -3.0, 0.0, 4.0]);
    }

    #[test]
    fn json_shape() {
        let p = Polynomial::monomial(vec![1.0, 2.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"basis":"monomial","coeffs":[1.0,2.0]}"#);
        let back: Polynomial =
            serde_json::from_str(r#"{"basis":"chebyshev","coeffs":[3.0]}"#).unwrap();
        assert_eq!(back, Polynomial::chebyshev(vec![3.0]));
        assert!(
            serde_json::from_str::<Polynomial>(r#"{"basis":"chebyshev","coeffs":[]}"#).is_err()
        );
    }

    #[test]
    fn extrema_are_sorted_and_closed() {
        let e = chebyshev_extrema(4);
        assert_eq!(e.first(), Some(&-1.0));
        assert_eq!(e.last(), Some(&1.0));
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(e[2], 0.0);
    }
}
