use crate::error::{Error, Result};
use crate::problem::{CheckmarkInstance, MinimaxSolution};
use crate::remez::{find_extrema, Extremum, RemezConfig};

pub const DEFAULT_TOL_LEVEL: f64 = 1e-8;
pub const DEFAULT_TOL_ENDPOINT: f64 = 1e-9;

/// Alternation points of a minimax solution, in increasing order.
///
/// `signs[i]` is the sign of `e = f - p` at `points[i]`; the sign at `alpha`
/// is always `-1`. `k` and `l` count the points strictly inside `(-1, alpha)`
/// and `(alpha, 1)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlternationSet {
    pub points: Vec<f64>,
    pub signs: Vec<i8>,
    pub alpha: f64,
    pub k: usize,
    pub l: usize,
    pub contains_minus_one: bool,
    pub contains_plus_one: bool,
    pub count: usize,
}

impl AlternationSet {
    /// Exactly `n + 2` points with `-1`, `alpha` and `1` among them.
    pub fn is_regular(&self, n: usize) -> bool {
        self.count == n + 2 && self.contains_minus_one && self.contains_plus_one
    }

    /// Interior points left of `alpha`, nearest first (`u_1, u_2, ...`).
    pub fn left_points(&self) -> Vec<f64> {
        let lo = usize::from(self.contains_minus_one);
        self.points[lo..lo + self.k].iter().rev().copied().collect()
    }

    /// Interior points right of `alpha`, nearest first (`v_1, v_2, ...`).
    pub fn right_points(&self) -> Vec<f64> {
        let lo = usize::from(self.contains_minus_one) + self.k + 1;
        self.points[lo..lo + self.l].to_vec()
    }
}

/// Classifies the alternation set of a converged solution.
pub fn classify_alternation(
    sol: &MinimaxSolution,
    tol_level: f64,
    tol_endpoint: f64,
) -> Result<AlternationSet> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    let extrema = find_extrema(&sol.instance, &sol.poly, &RemezConfig::default());
    classify_extrema(
        &sol.instance,
        sol.error_level,
        &extrema,
        tol_level,
        tol_endpoint,
    )
}

/// Keeps extrema with `|e| >= (1 - tol_level) E`, collapses runs of equal
/// sign to their largest member (the kink wins its own run), and counts.
pub fn classify_extrema(
    inst: &CheckmarkInstance,
    error_level: f64,
    extrema: &[Extremum],
    tol_level: f64,
    tol_endpoint: f64,
) -> Result<AlternationSet> {
    let n = inst.n;
    let thresh = (1.0 - tol_level) * error_level;
    let mut kept: Vec<Extremum> = Vec::new();
    for c in extrema
        .iter()
        .filter(|c| c.e.abs() >= thresh || c.x == inst.alpha)
    {
        match kept.last_mut() {
            Some(last) if (last.e > 0.0) == (c.e > 0.0) => {
                if last.x != inst.alpha && (c.x == inst.alpha || c.e.abs() > last.e.abs()) {
                    *last = *c;
                }
            }
            _ => kept.push(*c),
        }
    }

    let alpha = inst.alpha;
    let a_idx = kept
        .iter()
        .position(|c| c.x == alpha)
        .ok_or(Error::TooFewAlternationPoints {
            count: kept.len(),
            needed: n + 2,
        })?;
    if kept[a_idx].e >= 0.0 || kept[a_idx].e.abs() < thresh {
        return Err(Error::NonAlternating { at: alpha });
    }
    if let Some(w) = kept.windows(2).find(|w| (w[0].e > 0.0) == (w[1].e > 0.0)) {
        return Err(Error::NonAlternating { at: w[1].x });
    }

    let count = kept.len();
    if count < n + 2 {
        return Err(Error::TooFewAlternationPoints {
            count,
            needed: n + 2,
        });
    }
    if count > n + 3 {
        return Err(Error::TooManyAlternationPoints {
            count,
            allowed: n + 3,
        });
    }
    let contains_minus_one = kept[0].x <= -1.0 + tol_endpoint;
    let contains_plus_one = kept[count - 1].x >= 1.0 - tol_endpoint;
    let k = a_idx - usize::from(contains_minus_one);
    let l = count - 1 - a_idx - usize::from(contains_plus_one);
    Ok(AlternationSet {
        points: kept.iter().map(|c| c.x).collect(),
        signs: kept
            .iter()
            .map(|c| if c.e > 0.0 { 1 } else { -1 })
            .collect(),
        alpha,
        k,
        l,
        contains_minus_one,
        contains_plus_one,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::remez::{remez_solve, RemezConfig};

    fn solve(n: usize, a: f64) -> MinimaxSolution {
        remez_solve(
            &CheckmarkInstance::new(n, a).unwrap(),
            &RemezConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn degree_one_set() {
        let s =
            classify_alternation(&solve(1, 0.5), DEFAULT_TOL_LEVEL, DEFAULT_TOL_ENDPOINT).unwrap();
        assert_eq!(s.points, vec![-1.0, 0.5, 1.0]);
        assert_eq!(s.signs, vec![1, -1, 1]);
        assert_eq!((s.k, s.l, s.count), (0, 0, 3));
    }

    #[test]
    fn degree_two_tip_has_five_points() {
        let s =
            classify_alternation(&solve(2, 0.0), DEFAULT_TOL_LEVEL, DEFAULT_TOL_ENDPOINT).unwrap();
        assert_eq!(s.count, 5);
        for (x, w) in s.points.iter().zip([-1.0, -0.5, 0.0, 0.5, 1.0]) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_five_phase_four() {
        let s =
            classify_alternation(&solve(5, 0.75), DEFAULT_TOL_LEVEL, DEFAULT_TOL_ENDPOINT).unwrap();
        assert_eq!((s.k, s.l, s.count), (3, 1, 7));
        assert!(s.contains_minus_one && s.contains_plus_one);
        assert_eq!(s.left_points().len(), 3);
        assert!(s.left_points().windows(2).all(|w| w[0] > w[1]));
        assert_eq!(s.right_points().len(), 1);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let inst = CheckmarkInstance::new(2, 0.0).unwrap();
        let ex = [
            Extremum { x: -1.0, e: -0.1 },
            Extremum { x: 0.0, e: -0.125 },
            Extremum { x: 1.0, e: 0.125 },
        ];
        assert!(matches!(
            classify_extrema(&inst, 0.125, &ex, 1e-8, 1e-9),
            Err(Error::TooFewAlternationPoints { .. })
        ));
    }

    #[test]
    fn positive_error_at_kink_is_inconsistent() {
        let inst = CheckmarkInstance::new(1, 0.0).unwrap();
        let ex = [
            Extremum { x: -1.0, e: -0.5 },
            Extremum { x: 0.0, e: 0.5 },
            Extremum { x: 1.0, e: -0.5 },
        ];
        assert!(matches!(
            classify_extrema(&inst, 0.5, &ex, 1e-8, 1e-9),
            Err(Error::NonAlternating { .. })
        ));
    }
}
