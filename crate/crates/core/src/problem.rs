//! The checkmark family `f(x; a) = |x - a|` and its minimax solutions.

use serde::Serialize;

use crate::analysis::AlternationSet;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::remez::ReferenceSet;

/// Largest degree the solvers accept in double precision.
pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckmarkInstance {
    pub n: usize,
    pub alpha: f64,
}

impl CheckmarkInstance {
    /// Validates `-1 < alpha < 1` and `n <= MAX_DEGREE`. Degree zero is
    /// accepted here; the exchange solver rejects it separately.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha < 1.0) {
            return Err(Error::InvalidInstance(format!(
                "alpha must lie in (-1, 1), got {alpha}"
            )));
        }
        if n > MAX_DEGREE {
            return Err(Error::InvalidInstance(format!(
                "degree {n} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        Ok(CheckmarkInstance { n, alpha })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.n, alpha)
    }

    pub fn with_degree(self, n: usize) -> Result<Self> {
        Self::new(n, self.alpha)
    }

    pub fn mirrored(self) -> Self {
        CheckmarkInstance {
            n: self.n,
            alpha: -self.alpha,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        checkmark_eval(self.alpha, x)
    }
}

pub fn checkmark_eval(alpha: f64, x: f64) -> f64 {
    (x - alpha).abs()
}

/// Best uniform approximation of degree `n` together with its alternation data.
///
/// `poly` is kept in the Chebyshev basis. With the sign convention used
/// throughout, `poly(alpha) = error_level`.
#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    pub instance: CheckmarkInstance,
    pub poly: Polynomial,
    pub error_level: f64,
    pub alternation: AlternationSet,
    pub converged: bool,
    pub residual: f64,
    /// Final reference of the exchange, reused for warm starts.
    pub reference: ReferenceSet,
}

impl MinimaxSolution {
    pub fn n(&self) -> usize {
        self.instance.n
    }

    pub fn alpha(&self) -> f64 {
        self.instance.alpha
    }

    /// `e(x) = f(x) - p(x)`.
    pub fn error_at(&self, x: f64) -> f64 {
        self.instance.eval(x) - self.poly.eval(x)
    }

    pub fn leading_coeff(&self) -> f64 {
        self.poly.leading_monomial_coeff()
    }

    pub fn to_json(&self) -> SolutionJson {
        SolutionJson {
            n: self.n(),
            alpha: self.alpha(),
            coeffs_cheb: self.poly.to_chebyshev().coeffs().to_vec(),
            coeffs_mono: self.poly.to_monomial().coeffs().to_vec(),
            e: self.error_level,
            alternation: AlternationJson {
                points: self.alternation.points.clone(),
                signs: self.alternation.signs.clone(),
                k: self.alternation.k,
                l: self.alternation.l,
            },
            converged: self.converged,
            residual: self.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionJson {
    pub n: usize,
    pub alpha: f64,
    pub coeffs_cheb: Vec<f64>,
    pub coeffs_mono: Vec<f64>,
    #[serde(rename = "E")]
    pub e: f64,
    pub alternation: AlternationJson,
    pub converged: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternationJson {
    pub points: Vec<f64>,
    pub signs: Vec<i8>,
    pub k: usize,
    pub l: usize,
}

/// Normalized error `g(x) = (p(x) - |x - a|) / E`.
pub fn g_eval(sol: &MinimaxSolution, x: f64) -> Result<f64> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    Ok(-sol.error_at(x) / sol.error_level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkmark_values() {
        assert_eq!(checkmark_eval(0.5, 0.5), 0.0);
        assert_eq!(checkmark_eval(0.0, -0.3), 0.3);
        assert_eq!(checkmark_eval(-0.25, 1.0), 1.25);
    }

    #[test]
    fn checkmark_mirror_symmetry_is_exact() {
        for &(a, x) in &[(0.3, -0.7), (-0.123, 0.456), (0.999, -1.0)] {
            assert_eq!(checkmark_eval(a, x), checkmark_eval(-a, -x));
        }
    }

    #[test]
    fn instance_validation() {
        assert!(CheckmarkInstance::new(3, 1.0).is_err());
        assert!(CheckmarkInstance::new(3, -1.0).is_err());
        assert!(CheckmarkInstance::new(3, f64::NAN).is_err());
        assert!(CheckmarkInstance::new(13, 0.0).is_err());
        assert!(CheckmarkInstance::new(0, 0.2).is_ok());
    }
}
