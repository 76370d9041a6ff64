use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::MinimaxSolution;

/// Bracket bounds for the search of `w` outside `[-1, 1]`.
pub const EXTERNAL_START: f64 = 10.0;
pub const EXTERNAL_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Critical point `w` of the normalized error outside `[-1, 1]`.
///
/// `escaped` is set when no root was found up to [`EXTERNAL_CAP`] although
/// the alternation pattern is the regular one, i.e. `w` has run off to
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExternalExtremum {
    pub exists: bool,
    pub w: Option<f64>,
    pub side: Option<Side>,
    pub escaped: bool,
}

impl ExternalExtremum {
    fn none(escaped: bool) -> Self {
        ExternalExtremum {
            exists: false,
            w: None,
            side: None,
            escaped,
        }
    }
}

/// First root of `h` on `(1, X]`, expanding `X` by doubling up to the cap.
/// `dir` maps the search to the left half-line when negative.
fn search(h: &impl Fn(f64) -> f64, dir: f64) -> Option<f64> {
    let at = |t: f64| h(dir * t);
    let mut lo = 1.0;
    let mut flo = at(lo);
    let mut hi_cap = EXTERNAL_START;
    loop {
        // Geometric scan of (lo, hi_cap] in the offset t - 1 so that roots
        // hugging the interval are not stepped over.
        let steps = 96;
        let d0 = (lo - 1.0).max(1e-13);
        let ratio = ((hi_cap - 1.0) / d0).powf(1.0 / steps as f64);
        let mut d = d0;
        for _ in 0..steps {
            d *= ratio;
            let t = (1.0 + d).min(hi_cap);
            let ft = at(t);
            if flo == 0.0 && lo > 1.0 {
                return Some(dir * lo);
            }
            if flo * ft < 0.0 || ft == 0.0 {
                let (mut a, mut b, mut fa) = (lo, t, flo);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = at(m);
                    if (fm > 0.0) == (fa > 0.0) && fm != 0.0 {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                return Some(dir * 0.5 * (a + b));
            }
            lo = t;
            flo = ft;
        }
        if hi_cap >= EXTERNAL_CAP {
            return None;
        }
        hi_cap = (hi_cap * 2.0).min(EXTERNAL_CAP);
    }
}

pub fn external_extremum(sol: &MinimaxSolution) -> Result<ExternalExtremum> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    if sol.n() < 2 {
        return Ok(ExternalExtremum::none(false));
    }
    let dp = sol.poly.derivative();
    let right = search(&|x| dp.eval(x) - 1.0, 1.0);
    let left = search(&|x| dp.eval(x) + 1.0, -1.0);
    match (left, right) {
        (Some(l), Some(r)) => Err(Error::AmbiguousExternalExtremum { left: l, right: r }),
        (Some(w), None) => Ok(ExternalExtremum {
            exists: true,
            w: Some(w),
            side: Some(Side::Left),
            escaped: false,
        }),
        (None, Some(w)) => Ok(ExternalExtremum {
            exists: true,
            w: Some(w),
            side: Some(Side::Right),
            escaped: false,
        }),
        (None, None) => Ok(ExternalExtremum::none(sol.alternation.is_regular(sol.n()))),
    }
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
    fn phase_one_extremum_is_right_of_one() {
        let sol = solve(5, 0.95);
        let w = external_extremum(&sol).unwrap();
        assert!(w.exists);
        assert_eq!(w.side, Some(Side::Right));
        let x = w.w.unwrap();
        assert!(x > 1.0);
        assert!((sol.poly.derivative().eval(x) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phase_four_extremum_is_left_of_minus_one() {
        let sol = solve(5, 0.75);
        let w = external_extremum(&sol).unwrap();
        assert_eq!(w.side, Some(Side::Left));
        let x = w.w.unwrap();
        assert!(x < -1.0);
        assert!((sol.poly.derivative().eval(x) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn degree_one_has_none() {
        for a in [-0.7, 0.0, 0.4] {
            let w = external_extremum(&solve(1, a)).unwrap();
            assert!(!w.exists && !w.escaped);
        }
    }
}
