//! V-shapes of `E_n(alpha)`: phase labels along a sweep, bisection of the
//! transitions, degree-loss points, interlacing and the behaviour at 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{error_derivative, AlternationSet};
use crate::error::{Error, Result};
use crate::problem::{CheckmarkInstance, MinimaxSolution};
use crate::remez::{remez_solve, RemezConfig};
use crate::sweep::{run_sweep, Sweep, SweepConfig, SweepRow};

/// Bisection tolerance in `alpha`.
pub const TRANSITION_TOL: f64 = 1e-10;
/// Relative residual allowed for a straight-line fit of a leg.
pub const LEG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhaseLabel {
    Outside,
    RightLeg,
    Tip,
    LeftLeg,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Outside => "OUTSIDE",
            PhaseLabel::RightLeg => "RIGHT_LEG",
            PhaseLabel::Tip => "TIP",
            PhaseLabel::LeftLeg => "LEFT_LEG",
        }
    }
}

/// `n + 3` points is a tip; otherwise a missing `+1` puts `alpha` on the
/// right leg of a V-shape and a missing `-1` on the left leg.
pub fn label_phase(set: &AlternationSet, n: usize) -> Result<PhaseLabel> {
    if !set.contains_minus_one && !set.contains_plus_one {
        return Err(Error::Configuration(format!(
            "alternation set at alpha = {} misses both endpoints",
            set.alpha
        )));
    }
    Ok(if set.count == n + 3 {
        PhaseLabel::Tip
    } else if !set.contains_plus_one {
        PhaseLabel::RightLeg
    } else if !set.contains_minus_one {
        PhaseLabel::LeftLeg
    } else {
        PhaseLabel::Outside
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    RightEndpoint,
    Tip,
    LeftEndpoint,
    DegreeLoss,
}

fn solve(n: usize, alpha: f64, cfg: &RemezConfig) -> Result<MinimaxSolution> {
    remez_solve(&CheckmarkInstance::new(n, alpha)?, cfg)
}

/// The function whose zero locates a transition of `E_n`.
pub fn indicator(n: usize, kind: TransitionKind, alpha: f64, cfg: &RemezConfig) -> Result<f64> {
    Ok(match kind {
        TransitionKind::RightEndpoint => solve(n, alpha, cfg)?.poly.derivative().eval(1.0) - 1.0,
        TransitionKind::LeftEndpoint => solve(n, alpha, cfg)?.poly.derivative().eval(-1.0) + 1.0,
        TransitionKind::Tip => solve(n + 1, alpha, cfg)?.leading_coeff(),
        TransitionKind::DegreeLoss => solve(n, alpha, cfg)?.leading_coeff(),
    })
}

/// Bisects the indicator of `kind` on `bracket` down to [`TRANSITION_TOL`].
pub fn refine_transition(
    n: usize,
    kind: TransitionKind,
    bracket: (f64, f64),
    cfg: &RemezConfig,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let mut f_lo = indicator(n, kind, lo, cfg)?;
    let f_hi = indicator(n, kind, hi, cfg)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > TRANSITION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = indicator(n, kind, mid, cfg).map_err(|e| Error::Bisection {
            lo,
            hi,
            source: Box::new(e),
        })?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegFit {
    pub slope: f64,
    pub intercept: f64,
    pub rows: usize,
    /// `max |E - fit| / E` over the rows of the leg.
    pub max_rel_residual: f64,
}

fn fit_line(points: &[(f64, f64)]) -> Option<LegFit> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_rel_residual = points
        .iter()
        .map(|&(x, y)| (y - (slope * x + intercept)).abs() / y)
        .fold(0.0, f64::max);
    Some(LegFit {
        slope,
        intercept,
        rows: points.len(),
        max_rel_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VShape {
    pub index: usize,
    pub gamma: f64,
    pub tip: f64,
    pub beta: f64,
    pub left_leg: Option<LegFit>,
    pub right_leg: Option<LegFit>,
    /// Intersection of the two fitted legs, a cross-check on `tip`.
    pub tip_from_legs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub n: usize,
    pub vshapes: Vec<VShape>,
    pub degree_loss_points: Vec<f64>,
    pub count: usize,
    /// Set when some transition could not be bracketed or refined.
    pub partial: bool,
    /// Deviations from the expected structure, in plain words.
    pub findings: Vec<String>,
}

#[derive(Serialize)]
struct VShapeJson {
    gamma: f64,
    tip: f64,
    beta: f64,
}

#[derive(Serialize)]
struct DiagramJson {
    n: usize,
    vshapes: Vec<VShapeJson>,
    degree_loss: Vec<f64>,
    count: usize,
}

impl PhaseDiagram {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DiagramJson {
            n: self.n,
            vshapes: self
                .vshapes
                .iter()
                .map(|v| VShapeJson {
                    gamma: v.gamma,
                    tip: v.tip,
                    beta: v.beta,
                })
                .collect(),
            degree_loss: self.degree_loss_points.clone(),
            count: self.count,
        })
        .expect("plain data serializes")
    }

    pub fn tips(&self) -> Vec<f64> {
        self.vshapes.iter().map(|v| v.tip).collect()
    }

    /// `E_n'` inside a V-shape, read off the fitted leg; the closed-form
    /// derivative does not apply there.
    pub fn leg_slope(&self, alpha: f64) -> Option<f64> {
        let v = self
            .vshapes
            .iter()
            .find(|v| v.gamma < alpha && alpha < v.beta)?;
        let fit = if alpha < v.tip {
            v.left_leg
        } else {
            v.right_leg
        };
        fit.map(|f| f.slope).filter(|_| alpha != v.tip)
    }

    /// All refined transition locations.
    pub fn transitions(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self
            .vshapes
            .iter()
            .flat_map(|v| [v.gamma, v.tip, v.beta])
            .chain(self.degree_loss_points.iter().copied())
            .collect();
        t.sort_by(f64::total_cmp);
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub margin: f64,
    /// Sweep points per expected V-shape.
    pub points_per_vshape: usize,
    /// Grid steps a bracket may be widened by when the indicator shows no
    /// sign change between neighbouring rows.
    pub max_widen: usize,
    pub remez: RemezConfig,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            margin: 1e-3,
            points_per_vshape: 2000,
            max_widen: 8,
            remez: RemezConfig::default(),
        }
    }
}

impl PhaseConfig {
    pub fn sweep_config(&self, n: usize) -> SweepConfig {
        let steps = self.points_per_vshape * n.saturating_sub(1).max(1) + 1;
        SweepConfig {
            remez: self.remez,
            ..SweepConfig::new(n, -1.0 + self.margin, 1.0 - self.margin, steps)
        }
    }
}

/// A transition between rows `i` and `i + 1`.
#[derive(Debug, Clone, Copy)]
struct Pending {
    kind: TransitionKind,
    i: usize,
}

fn refine_pending(
    n: usize,
    rows: &[SweepRow],
    p: Pending,
    cfg: &PhaseConfig,
) -> std::result::Result<f64, String> {
    let mut last_err = None;
    for widen in 0..=cfg.max_widen {
        let lo = p.i.saturating_sub(widen);
        let hi = (p.i + 1 + widen).min(rows.len() - 1);
        match refine_transition(n, p.kind, (rows[lo].alpha, rows[hi].alpha), &cfg.remez) {
            Ok(x) => return Ok(x),
            Err(Error::Bracket { .. }) => continue,
            Err(e) => {
                last_err = Some(e.to_string());
                break;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| {
        format!(
            "{:?} near alpha = {} could not be bracketed",
            p.kind, rows[p.i].alpha
        )
    }))
}

/// Scans the sweep labels for V-shapes (maximal runs of non-`OUTSIDE`
/// rows) and sign changes of `c_n`, refines every transition, and fits the
/// legs.
pub fn detect_vshapes(sweep: &Sweep, cfg: &PhaseConfig) -> Result<PhaseDiagram> {
    let n = sweep.config.n;
    let rows = &sweep.rows;
    let mut findings = Vec::new();
    let mut partial = false;
    if rows.len() < 2 {
        return Err(Error::Configuration("sweep has fewer than two rows".into()));
    }

    // Runs of V-shape rows as half-open index ranges.
    let mut runs = Vec::new();
    let mut start = None;
    for (i, r) in rows.iter().enumerate() {
        match (r.phase_label != PhaseLabel::Outside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(s..rows.len());
    }

    let mut pending = Vec::new();
    let mut shapes = Vec::new();
    for run in &runs {
        if run.start == 0 || run.end == rows.len() {
            findings.push(format!(
                "V-shape rows touch the sweep boundary near alpha = {}",
                rows[run.start].alpha
            ));
            partial = true;
            continue;
        }
        let labels: Vec<PhaseLabel> = rows[run.clone()].iter().map(|r| r.phase_label).collect();
        // Expected order: left leg, (tip), right leg.
        let last_left = labels.iter().rposition(|&l| l == PhaseLabel::LeftLeg);
        let first_right = labels.iter().position(|&l| l == PhaseLabel::RightLeg);
        let ordered = match (last_left, first_right) {
            (Some(a), Some(b)) => {
                a < b
                    && labels[..=a].iter().all(|&l| l == PhaseLabel::LeftLeg)
                    && labels[b..].iter().all(|&l| l == PhaseLabel::RightLeg)
            }
            _ => false,
        };
        if !ordered {
            findings.push(format!(
                "labels between alpha = {} and {} are not LEFT_LEG then RIGHT_LEG",
                rows[run.start].alpha,
                rows[run.end - 1].alpha
            ));
            partial = true;
            continue;
        }
        let (a, b) = (
            run.start + last_left.unwrap(),
            run.start + first_right.unwrap(),
        );
        let base = pending.len();
        pending.push(Pending {
            kind: TransitionKind::LeftEndpoint,
            i: run.start - 1,
        });
        // The tip lies between the last left-leg row and the first right-leg row;
        // any TIP rows in between are inside that bracket.
        pending.push(Pending {
            kind: TransitionKind::Tip,
            i: a,
        });
        pending.push(Pending {
            kind: TransitionKind::RightEndpoint,
            i: run.end - 1,
        });
        shapes.push((base, run.start..=a, b..run.end, b - a));
    }

    let degree_loss_at: Vec<usize> = rows
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].leading_coeff_mono > 0.0) != (w[1].leading_coeff_mono > 0.0))
        .map(|(i, _)| i)
        .collect();
    let dl_base = pending.len();
    pending.extend(degree_loss_at.iter().map(|&i| Pending {
        kind: TransitionKind::DegreeLoss,
        i,
    }));

    // For the tip bracket the gap may exceed one step when TIP rows sit in it.
    let refined: Vec<std::result::Result<f64, String>> = pending
        .par_iter()
        .map(|p| {
            if p.kind == TransitionKind::Tip {
                let gap = shapes
                    .iter()
                    .find(|s| s.1.end() == &p.i)
                    .map(|s| s.3)
                    .unwrap_or(1);
                let hi = p.i + gap;
                refine_transition(n, p.kind, (rows[p.i].alpha, rows[hi].alpha), &cfg.remez)
                    .or_else(|_| refine_pending(n, rows, *p, cfg))
            } else {
                refine_pending(n, rows, *p, cfg)
            }
        })
        .collect();

    let mut vshapes = Vec::new();
    for (base, left, right, _) in &shapes {
        let got: Vec<_> = refined[*base..*base + 3].to_vec();
        if let Some(Err(msg)) = got.iter().find(|r| r.is_err()) {
            findings.push(msg.clone());
            partial = true;
            continue;
        }
        let [gamma, tip, beta] = [0, 1, 2].map(|j| got[j].clone().expect("checked"));
        let leg = |range: Vec<usize>| {
            let pts: Vec<(f64, f64)> = range
                .into_iter()
                .map(|i| (rows[i].alpha, rows[i].e))
                .collect();
            fit_line(&pts)
        };
        let left_leg = leg(left.clone().collect());
        let right_leg = leg(right.clone().collect());
        let tip_from_legs = match (left_leg, right_leg) {
            (Some(l), Some(r)) if l.slope != r.slope => {
                Some((r.intercept - l.intercept) / (l.slope - r.slope))
            }
            _ => None,
        };
        for (name, fit) in [("left", left_leg), ("right", right_leg)] {
            if let Some(f) = fit {
                if f.max_rel_residual > LEG_TOL {
                    findings.push(format!(
                        "{name} leg of the V-shape at {tip} deviates from a line by {:e}",
                        f.max_rel_residual
                    ));
                }
            }
        }
        if let Some(t) = tip_from_legs {
            if (t - tip).abs() > 1e-6 {
                findings.push(format!("leg intersection {t} disagrees with tip {tip}"));
            }
        }
        if !(gamma < tip && tip < beta) {
            findings.push(format!("transitions out of order: {gamma}, {tip}, {beta}"));
        }
        vshapes.push(VShape {
            index: vshapes.len() + 1,
            gamma,
            tip,
            beta,
            left_leg,
            right_leg,
            tip_from_legs,
        });
    }

    let mut degree_loss_points = Vec::new();
    for r in &refined[dl_base..] {
        match r {
            Ok(x) => degree_loss_points.push(*x),
            Err(msg) => {
                findings.push(msg.clone());
                partial = true;
            }
        }
    }
    for &d in &degree_loss_points {
        if vshapes.iter().any(|v| v.gamma < d && d < v.beta) {
            findings.push(format!("degree-loss point {d} lies inside a V-shape"));
        }
    }
    if vshapes.windows(2).any(|w| w[0].beta >= w[1].gamma) {
        findings.push("V-shape intervals overlap".into());
    }
    let count = vshapes.len();
    if count + 1 != n {
        findings.push(format!(
            "{count} V-shapes found, {} expected",
            n.saturating_sub(1)
        ));
    }
    Ok(PhaseDiagram {
        n,
        vshapes,
        degree_loss_points,
        count,
        partial,
        findings,
    })
}

/// Full-range sweep and V-shape detection for degree `n`.
pub fn phase_diagram(n: usize, cfg: &PhaseConfig) -> Result<(PhaseDiagram, Sweep)> {
    let sweep = run_sweep(&cfg.sweep_config(n))?;
    let diagram = detect_vshapes(&sweep, cfg)?;
    Ok((diagram, sweep))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub n: usize,
    pub tips: Vec<f64>,
    pub previous_tips: Vec<f64>,
    pub findings: Vec<String>,
}

impl InterlacingReport {
    pub fn clean(&self) -> bool {
        self.findings.is_empty()
    }
}

fn any_between(xs: &[f64], lo: f64, hi: f64) -> bool {
    xs.iter().any(|&x| lo < x && x < hi)
}

/// Tips of `E_n` and `E_{n-1}` strictly alternate, with a tip of `E_n`
/// outermost on both sides, and no tip of `E_{n-1}` inside a V-shape of `E_n`.
pub fn verify_interlacing(diagram: &PhaseDiagram, previous: &PhaseDiagram) -> InterlacingReport {
    let tips = diagram.tips();
    let prev = previous.tips();
    let mut findings = Vec::new();
    for w in tips.windows(2) {
        if !any_between(&prev, w[0], w[1]) {
            findings.push(format!(
                "no tip of E_{} between tips {} and {}",
                previous.n, w[0], w[1]
            ));
        }
    }
    for w in prev.windows(2) {
        if !any_between(&tips, w[0], w[1]) {
            findings.push(format!(
                "no tip of E_{} between tips {} and {}",
                diagram.n, w[0], w[1]
            ));
        }
    }
    if let (Some(&first), Some(&last)) = (prev.first(), prev.last()) {
        if !any_between(&tips, last, 1.0) {
            findings.push(format!("no tip of E_{} right of {last}", diagram.n));
        }
        if !any_between(&tips, -1.0, first) {
            findings.push(format!("no tip of E_{} left of {first}", diagram.n));
        }
    }
    for &t in &prev {
        if diagram.vshapes.iter().any(|v| v.gamma <= t && t <= v.beta) {
            findings.push(format!(
                "tip {t} of E_{} lies inside a V-shape of E_{}",
                previous.n, diagram.n
            ));
        }
    }
    InterlacingReport {
        n: diagram.n,
        tips,
        previous_tips: prev,
        findings,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShekhtmanSample {
    pub delta: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    pub derivative_minus: Option<f64>,
    pub derivative_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShekhtmanReport {
    pub n: usize,
    pub e_zero: f64,
    pub samples: Vec<ShekhtmanSample>,
    /// `E_n(0) > E_n(+-delta)` for every sampled delta.
    pub local_max: bool,
    /// `E_n'(-delta) > 0 > E_n'(delta)` wherever the formula applies.
    pub sign_pattern: bool,
}

pub const SHEKHTMAN_DELTAS: [f64; 2] = [0.005, 0.02];

/// Local maximum of `E_n` at 0 for odd `n`.
pub fn shekhtman_check(n: usize, cfg: &RemezConfig) -> Result<ShekhtmanReport> {
    if n.is_multiple_of(2) || !(3..=11).contains(&n) {
        return Err(Error::Configuration(format!(
            "the local maximum at 0 is checked for odd 3 <= n <= 11, got {n}"
        )));
    }
    let e_zero = solve(n, 0.0, cfg)?.error_level;
    let mut samples = Vec::new();
    for delta in SHEKHTMAN_DELTAS {
        let minus = solve(n, -delta, cfg)?;
        let plus = solve(n, delta, cfg)?;
        let d = |s: &MinimaxSolution| error_derivative(s).ok().map(|r| r.En_prime);
        samples.push(ShekhtmanSample {
            delta,
            e_minus: minus.error_level,
            e_plus: plus.error_level,
            derivative_minus: d(&minus),
            derivative_plus: d(&plus),
        });
    }
    let local_max = samples
        .iter()
        .all(|s| e_zero > s.e_minus && e_zero > s.e_plus);
    let sign_pattern = samples.iter().all(|s| {
        s.derivative_minus.is_none_or(|d| d > 0.0) && s.derivative_plus.is_none_or(|d| d < 0.0)
    });
    Ok(ShekhtmanReport {
        n,
        e_zero,
        samples,
        local_max,
        sign_pattern,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub n: usize,
    pub samples: usize,
    /// Fraction of second differences `<= 1e-8`.
    pub concave_fraction: f64,
    pub max_second_difference: f64,
    /// For odd `n`: whether the sweep maximum sits at the row nearest 0.
    pub max_at_zero: Option<bool>,
}

/// Second differences of `E_n` outside all V-shapes, keeping 0.01 away from
/// every transition. Reports only.
pub fn concavity_probe(diagram: &PhaseDiagram, sweep: &Sweep) -> ConcavityReport {
    const BUFFER: f64 = 0.01;
    let transitions = diagram.transitions();
    let rows = &sweep.rows;
    let spacing =
        (sweep.config.alpha_max - sweep.config.alpha_min) / (sweep.config.steps - 1) as f64;
    let clear = |a: f64| {
        transitions.iter().all(|&t| (a - t).abs() > BUFFER)
            && !diagram.vshapes.iter().any(|v| v.gamma <= a && a <= v.beta)
    };
    let mut samples = 0;
    let mut concave = 0;
    let mut worst = f64::NEG_INFINITY;
    for w in rows.windows(3) {
        let evenly = (w[2].alpha - w[0].alpha - 2.0 * spacing).abs() < 1e-3 * spacing;
        if evenly && w.iter().all(|r| clear(r.alpha)) {
            let d2 = w[0].e - 2.0 * w[1].e + w[2].e;
            samples += 1;
            if d2 <= 1e-8 {
                concave += 1;
            }
            worst = worst.max(d2);
        }
    }
    let max_at_zero = (diagram.n % 2 == 1 && !rows.is_empty()).then(|| {
        let top = rows
            .iter()
            .max_by(|a, b| a.e.total_cmp(&b.e))
            .expect("non-empty");
        let nearest = rows
            .iter()
            .min_by(|a, b| a.alpha.abs().total_cmp(&b.alpha.abs()))
            .expect("non-empty");
        top.alpha == nearest.alpha
    });
    ConcavityReport {
        n: diagram.n,
        samples,
        concave_fraction: if samples == 0 {
            1.0
        } else {
            concave as f64 / samples as f64
        },
        max_second_difference: worst,
        max_at_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::classify_alternation;

    fn cfg() -> RemezConfig {
        RemezConfig::default()
    }

    fn label(n: usize, a: f64) -> PhaseLabel {
        let sol = solve(n, a, &cfg()).unwrap();
        label_phase(&sol.alternation, n).unwrap()
    }

    #[test]
    fn labels_of_known_points() {
        assert_eq!(label(5, 0.88), PhaseLabel::RightLeg);
        assert_eq!(label(5, 0.75), PhaseLabel::Outside);
        assert_eq!(label(2, 0.0), PhaseLabel::Tip);
    }

    #[test]
    fn both_endpoints_missing_is_inconsistent() {
        let sol = solve(3, 0.3, &cfg()).unwrap();
        let mut set = classify_alternation(&sol, 1e-8, 1e-9).unwrap();
        set.contains_minus_one = false;
        set.contains_plus_one = false;
        assert!(label_phase(&set, 3).is_err());
    }

    #[test]
    fn degree_five_transitions() {
        let c = cfg();
        let beta = refine_transition(5, TransitionKind::RightEndpoint, (0.88, 0.89), &c).unwrap();
        assert!((beta - 0.887).abs() < 2e-3, "{beta}");
        let tip = refine_transition(5, TransitionKind::Tip, (0.79, 0.80), &c).unwrap();
        assert!((tip - 0.7975).abs() < 2e-3, "{tip}");
        let e5 = solve(5, tip, &c).unwrap().error_level;
        let e6 = solve(6, tip, &c).unwrap().error_level;
        assert!((e5 - e6).abs() <= 1e-9, "{e5} {e6}");
        let dl = refine_transition(5, TransitionKind::DegreeLoss, (0.68, 0.70), &c).unwrap();
        assert!((dl - 0.69042).abs() < 2e-3, "{dl}");
        let e4 = solve(4, dl, &c).unwrap().error_level;
        let e5 = solve(5, dl, &c).unwrap().error_level;
        assert!((e5 - e4).abs() <= 1e-9, "{e5} {e4}");
    }

    #[test]
    fn bracket_without_sign_change() {
        let r = refine_transition(5, TransitionKind::RightEndpoint, (0.91, 0.95), &cfg());
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn degree_two_diagram() {
        let pc = PhaseConfig {
            points_per_vshape: 400,
            ..PhaseConfig::default()
        };
        let (d, sweep) = phase_diagram(2, &pc).unwrap();
        assert_eq!(d.count, 1, "{:?}", d.findings);
        assert!(d.vshapes[0].tip.abs() < 1e-6);
        assert!(d.degree_loss_points.is_empty());
        let json = d.to_json();
        assert_eq!(json["count"], 1);
        assert!(json["vshapes"][0].get("gamma").is_some());
        let slope = d.leg_slope(0.2).unwrap();
        let fd = (solve(2, 0.2 + 1e-4, &cfg()).unwrap().error_level
            - solve(2, 0.2 - 1e-4, &cfg()).unwrap().error_level)
            / 2e-4;
        assert!((slope - fd).abs() < 1e-8, "{slope} vs {fd}");
        assert!(d.leg_slope(0.5).is_none());
        let probe = concavity_probe(&d, &sweep);
        assert!(probe.samples > 0 && probe.max_at_zero.is_none());
    }

    #[test]
    fn shekhtman_small_odd() {
        let r = shekhtman_check(3, &cfg()).unwrap();
        assert!(r.local_max && r.sign_pattern, "{r:?}");
        assert!(shekhtman_check(4, &cfg()).is_err());
    }
}
