//! Multi-point exchange for the minimax polynomial of `|x - a|`.
//!
//! The kink `a` is pinned as a reference node for the whole run. Extrema of
//! the error are located separately on `[-1, a]` and `[a, 1]`, where the
//! error is a polynomial, by bracketing sign changes of its derivative.

use nalgebra::{DMatrix, DVector};

use crate::analysis::classify_extrema;
use crate::analysis::{DEFAULT_TOL_ENDPOINT, DEFAULT_TOL_LEVEL};
use crate::error::{Error, RemezIterate, Result};
use crate::poly::{chebyshev_extrema, Polynomial};
use crate::problem::{CheckmarkInstance, MinimaxSolution, MAX_DEGREE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemezConfig {
    /// Stop once `(max|e| - h) / h` falls below this.
    pub equioscillation_tol: f64,
    pub max_iterations: usize,
    pub scan_points_per_degree: usize,
    /// Abscissa tolerance when refining an interior extremum.
    pub refine_tol_x: f64,
}

impl Default for RemezConfig {
    fn default() -> Self {
        RemezConfig {
            equioscillation_tol: 1e-12,
            max_iterations: 100,
            scan_points_per_degree: 30,
            refine_tol_x: 1e-14,
        }
    }
}

impl RemezConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.equioscillation_tol > 0.0
            && self.refine_tol_x > 0.0
            && self.max_iterations >= 1
            && self.scan_points_per_degree >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "invalid exchange configuration {self:?}"
            )))
        }
    }
}

/// `n + 2` strictly increasing nodes in `[-1, 1]`, one of which is `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    pub nodes: Vec<f64>,
    pub alpha: f64,
}

impl ReferenceSet {
    pub fn contains_alpha(&self) -> bool {
        self.nodes.contains(&self.alpha)
    }

    fn is_valid_for(&self, inst: &CheckmarkInstance) -> bool {
        self.nodes.len() == inst.n + 2
            && self.alpha == inst.alpha
            && self.contains_alpha()
            && self.nodes.windows(2).all(|w| w[0] < w[1])
            && self.nodes[0] >= -1.0
            && self.nodes[self.nodes.len() - 1] <= 1.0
    }

    /// Moves the `alpha` node of a neighbouring reference to a new parameter
    /// value. Returns `None` when the result is not a valid reference.
    pub fn shifted_to(&self, inst: &CheckmarkInstance) -> Option<ReferenceSet> {
        let idx = self.nodes.iter().position(|&z| z == self.alpha)?;
        let mut nodes = self.nodes.clone();
        nodes[idx] = inst.alpha;
        let r = ReferenceSet {
            nodes,
            alpha: inst.alpha,
        };
        r.is_valid_for(inst).then_some(r)
    }
}

/// A local extremum candidate of `e(x) = |x - a| - p(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub e: f64,
}

/// Chebyshev extreme points of degree `n + 1` with the interior node closest
/// to `alpha` replaced by `alpha`.
pub fn initial_reference(inst: &CheckmarkInstance) -> ReferenceSet {
    let mut nodes = chebyshev_extrema(inst.n + 1);
    let m = nodes.len();
    let nearest = (1..m - 1)
        .min_by(|&i, &j| {
            (nodes[i] - inst.alpha)
                .abs()
                .total_cmp(&(nodes[j] - inst.alpha).abs())
        })
        .expect("n >= 1 gives at least one interior node");
    nodes[nearest] = inst.alpha;
    nodes.sort_by(f64::total_cmp);
    ReferenceSet {
        nodes,
        alpha: inst.alpha,
    }
}

fn chebyshev_row(x: f64, n: usize, row: &mut [f64]) {
    row[0] = 1.0;
    if n >= 1 {
        row[1] = x;
    }
    for j in 2..=n {
        row[j] = 2.0 * x * row[j - 1] - row[j - 2];
    }
}

/// Levelled interpolation on a reference: `p(z_i) + (-1)^i s h = f(z_i)`,
/// with the sign `s` chosen so that `h >= 0`.
pub fn solve_on_reference(
    reference: &ReferenceSet,
    inst: &CheckmarkInstance,
) -> Result<(Polynomial, f64)> {
    let n = inst.n;
    let m = n + 2;
    if !reference.is_valid_for(inst) {
        return Err(Error::Configuration(format!(
            "reference must hold {m} strictly increasing nodes in [-1, 1] including alpha"
        )));
    }
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    let mut row = vec![0.0; n + 1];
    for (i, &z) in reference.nodes.iter().enumerate() {
        chebyshev_row(z, n, &mut row);
        for j in 0..=n {
            a[(i, j)] = row[j];
        }
        a[(i, n + 1)] = if i % 2 == 0 { 1.0 } else { -1.0 };
        rhs[i] = inst.eval(z);
    }
    let sol = a.lu().solve(&rhs).ok_or(Error::DegenerateReference)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateReference);
    }
    let coeffs: Vec<f64> = sol.iter().take(n + 1).copied().collect();
    Ok((Polynomial::chebyshev(coeffs), sol[n + 1].abs()))
}

/// Chebyshev-distributed scan points on `[-1, 1]` (endpoints included).
fn scan_grid(count: usize) -> Vec<f64> {
    chebyshev_extrema(count.max(2) - 1)
}

/// All local extrema of `e(x) = |x - a| - p(x)` on `[-1, 1]`, sorted by `x`.
///
/// `-1`, `a` and `1` are always returned. Interior extrema of each smooth
/// piece are the sign changes of `e'`, refined by bisection.
pub fn find_extrema(inst: &CheckmarkInstance, p: &Polynomial, cfg: &RemezConfig) -> Vec<Extremum> {
    let alpha = inst.alpha;
    let dp = p.derivative();
    let grid = scan_grid(cfg.scan_points_per_degree * (inst.n + 2));
    let mut out: Vec<Extremum> = [-1.0, alpha, 1.0]
        .iter()
        .map(|&x| Extremum {
            x,
            e: inst.eval(x) - p.eval(x),
        })
        .collect();

    for (lo, hi, slope) in [(-1.0, alpha, -1.0), (alpha, 1.0, 1.0)] {
        let de = |x: f64| slope - dp.eval(x);
        let mut pts = vec![lo];
        pts.extend(grid.iter().copied().filter(|&x| x > lo && x < hi));
        pts.push(hi);
        let vals: Vec<f64> = pts.iter().map(|&x| de(x)).collect();
        for i in 0..pts.len() - 1 {
            let (a, b) = (pts[i], pts[i + 1]);
            let (da, db) = (vals[i], vals[i + 1]);
            let root = if da == 0.0 {
                if i == 0 {
                    continue;
                }
                a
            } else if da * db < 0.0 {
                bisect_root(&de, a, b, da, cfg.refine_tol_x)
            } else {
                continue;
            };
            if root > lo && root < hi {
                out.push(Extremum {
                    x: root,
                    e: inst.eval(root) - p.eval(root),
                });
            }
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    out.dedup_by(|a, b| (a.x - b.x).abs() <= 1e-15);
    out
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64, tol: f64) -> f64 {
    let lo_positive = flo > 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Multi-point exchange: keep one extremum per sign lobe (always `alpha` in
/// its own lobe) and pick the window of `n + 2` alternating candidates
/// around `alpha` with the largest smallest deviation.
fn exchange(
    inst: &CheckmarkInstance,
    p: &Polynomial,
    reference: &ReferenceSet,
    extrema: &[Extremum],
) -> Result<ReferenceSet> {
    let m = inst.n + 2;
    let mut cands: Vec<Extremum> = extrema.to_vec();
    cands.extend(reference.nodes.iter().map(|&x| Extremum {
        x,
        e: inst.eval(x) - p.eval(x),
    }));
    cands.retain(|c| c.e != 0.0);
    cands.sort_by(|a, b| a.x.total_cmp(&b.x));
    cands.dedup_by(|a, b| a.x == b.x);

    let mut lobes: Vec<Extremum> = Vec::with_capacity(cands.len());
    let mut lobe_has_alpha: Vec<bool> = Vec::new();
    for c in cands {
        let is_alpha = c.x == inst.alpha;
        match lobes.last_mut() {
            Some(last) if (last.e > 0.0) == (c.e > 0.0) => {
                let has_alpha = lobe_has_alpha.last_mut().unwrap();
                if is_alpha || (!*has_alpha && c.e.abs() > last.e.abs()) {
                    *last = c;
                }
                *has_alpha |= is_alpha;
            }
            _ => {
                lobes.push(c);
                lobe_has_alpha.push(is_alpha);
            }
        }
    }
    if lobes.len() < m {
        return Err(Error::DegenerateReference);
    }
    let a_idx = lobes
        .iter()
        .position(|c| c.x == inst.alpha)
        .ok_or(Error::DegenerateReference)?;
    let g_idx = (0..lobes.len())
        .max_by(|&i, &j| lobes[i].e.abs().total_cmp(&lobes[j].e.abs()))
        .unwrap();

    let first = (a_idx + 1).saturating_sub(m);
    let last = a_idx.min(lobes.len() - m);
    let score = |s: usize| {
        let w = &lobes[s..s + m];
        let min = w.iter().map(|c| c.e.abs()).fold(f64::INFINITY, f64::min);
        let sum: f64 = w.iter().map(|c| c.e.abs()).sum();
        (s <= g_idx && g_idx < s + m, min, sum)
    };
    let best = (first..=last)
        .max_by(|&i, &j| {
            let (gi, mi, si) = score(i);
            let (gj, mj, sj) = score(j);
            gi.cmp(&gj).then(mi.total_cmp(&mj)).then(si.total_cmp(&sj))
        })
        .unwrap();
    Ok(ReferenceSet {
        nodes: lobes[best..best + m].iter().map(|c| c.x).collect(),
        alpha: inst.alpha,
    })
}

fn check_degree(inst: &CheckmarkInstance) -> Result<()> {
    if inst.n == 0 || inst.n > MAX_DEGREE {
        return Err(Error::InvalidInstance(format!(
            "exchange solver needs 1 <= n <= {MAX_DEGREE}, got {}",
            inst.n
        )));
    }
    Ok(())
}

pub fn remez_solve(inst: &CheckmarkInstance, cfg: &RemezConfig) -> Result<MinimaxSolution> {
    remez_solve_from(inst, cfg, None)
}

/// Runs the exchange, optionally warm-started from a neighbouring reference.
/// An unusable warm reference falls back to [`initial_reference`].
pub fn remez_solve_from(
    inst: &CheckmarkInstance,
    cfg: &RemezConfig,
    warm: Option<&ReferenceSet>,
) -> Result<MinimaxSolution> {
    check_degree(inst)?;
    cfg.validate()?;
    let mut reference = warm
        .and_then(|r| r.shifted_to(inst))
        .unwrap_or_else(|| initial_reference(inst));

    let mut last = None;
    let mut best_defect = f64::INFINITY;
    let mut stalled = 0;
    for iteration in 1..=cfg.max_iterations {
        let (p, h) = solve_on_reference(&reference, inst)?;
        if h <= f64::MIN_POSITIVE {
            return Err(Error::DegenerateReference);
        }
        let extrema = find_extrema(inst, &p, cfg);
        let max_error = extrema.iter().map(|c| c.e.abs()).fold(0.0, f64::max);
        let defect = (max_error - h) / h;

        // Once the levelled error and the true maximum agree to a few ulps
        // further exchanges only shuffle rounding noise.
        if defect < best_defect * 0.5 {
            best_defect = defect;
            stalled = 0;
        } else {
            stalled += 1;
        }
        let at_noise_floor = stalled >= 3 && defect <= 64.0 * f64::EPSILON * (inst.n + 2) as f64;

        if defect <= cfg.equioscillation_tol || at_noise_floor {
            let alternation = classify_extrema(
                inst,
                max_error,
                &extrema,
                DEFAULT_TOL_LEVEL,
                DEFAULT_TOL_ENDPOINT,
            )?;
            return Ok(MinimaxSolution {
                instance: *inst,
                poly: p,
                error_level: max_error,
                alternation,
                converged: true,
                residual: defect.max(0.0),
                reference,
            });
        }
        let next = exchange(inst, &p, &reference, &extrema)?;
        last = Some((
            iteration,
            defect,
            RemezIterate {
                reference: reference.clone(),
                poly: p,
                level: h,
                max_error,
            },
        ));
        reference = next;
    }
    let (iterations, defect, iterate) = last.expect("max_iterations >= 1");
    Err(Error::NotConverged {
        iterations,
        defect,
        last: Box::new(iterate),
    })
}
