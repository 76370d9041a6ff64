//! Continuation over `alpha`: warm-started solves on a uniform grid, the
//! per-row analysis quantities, CSV export and alternation trajectories.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{error_derivative, external_extremum, AlternationSet};
use crate::error::{Error, Result};
use crate::phases::{label_phase, PhaseLabel};
use crate::problem::{CheckmarkInstance, MinimaxSolution};
use crate::remez::{ReferenceSet, RemezConfig};
use crate::solver::{MinimaxSolver, Remez};

/// Grid points per independently cold-started chunk.
pub const CHUNK: usize = 64;
/// Slack allowed for a trajectory to step backwards.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub remez: RemezConfig,
    pub fd_step: f64,
}

impl SweepConfig {
    pub fn new(n: usize, alpha_min: f64, alpha_max: f64, steps: usize) -> Self {
        SweepConfig {
            n,
            alpha_min,
            alpha_max,
            steps,
            remez: RemezConfig::default(),
            fd_step: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inside = |a: f64| a > -1.0 && a < 1.0;
        if !(inside(self.alpha_min) && inside(self.alpha_max) && self.alpha_min < self.alpha_max) {
            return Err(Error::Configuration(format!(
                "sweep range [{}, {}] must be increasing and inside (-1, 1)",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::Configuration(
                "a sweep needs at least 2 steps".into(),
            ));
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err(Error::Configuration(
                "finite-difference step must be positive".into(),
            ));
        }
        self.remez.validate()?;
        CheckmarkInstance::new(self.n, self.alpha_min)?;
        Ok(())
    }

    pub fn alpha(&self, i: usize) -> f64 {
        let t = i as f64 / (self.steps - 1) as f64;
        self.alpha_min + t * (self.alpha_max - self.alpha_min)
    }

    /// The same sweep over `[-alpha_max, -alpha_min]`.
    pub fn mirrored(&self) -> Self {
        SweepConfig {
            alpha_min: -self.alpha_max,
            alpha_max: -self.alpha_min,
            ..self.clone()
        }
    }
}

/// Why the closed-form derivative was not evaluated on a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    MissingEndpoint,
    ExtraPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaDerivative {
    Value(f64),
    Degenerate(Degeneracy),
}

impl FormulaDerivative {
    pub fn value(&self) -> Option<f64> {
        match *self {
            FormulaDerivative::Value(v) => Some(v),
            FormulaDerivative::Degenerate(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub k: usize,
    pub l: usize,
    pub count: usize,
    pub contains_minus_one: bool,
    pub contains_plus_one: bool,
    pub w: Option<f64>,
    pub w_escaped: bool,
    pub en_prime_formula: FormulaDerivative,
    pub en_prime_fd: f64,
    pub leading_coeff_mono: f64,
    /// `p'(-1) + 1` and `p'(1) - 1`; they vanish at V-shape endpoints.
    pub slope_minus: f64,
    pub slope_plus: f64,
    pub phase_label: PhaseLabel,
}

impl SweepRow {
    pub fn pattern(&self) -> (usize, usize, bool, bool) {
        (
            self.k,
            self.l,
            self.contains_minus_one,
            self.contains_plus_one,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub alpha: f64,
    pub message: String,
}

/// Rows in increasing `alpha`, the solutions behind them, and any grid
/// points whose solve failed.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub solutions: Vec<MinimaxSolution>,
    pub failures: Vec<SweepFailure>,
}

pub const CSV_HEADER: &str =
    "alpha,E,k,l,count,has_m1,has_p1,w,En_prime_formula,En_prime_fd,leading_coeff,phase";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{:e},{},{},{},{},{},{},{},{:e},{:e},{}",
                r.alpha,
                r.e,
                r.k,
                r.l,
                r.count,
                u8::from(r.contains_minus_one),
                u8::from(r.contains_plus_one),
                opt(r.w),
                opt(r.en_prime_formula.value()),
                r.en_prime_fd,
                r.leading_coeff_mono,
                r.phase_label.as_str(),
            );
        }
        out
    }
}

fn analyze_row(
    sol: &MinimaxSolution,
    cfg: &SweepConfig,
    solver: &dyn MinimaxSolver,
) -> Result<SweepRow> {
    let n = cfg.n;
    let set = &sol.alternation;
    let a = sol.alpha();
    let ext = external_extremum(sol)?;
    let en_prime_formula = if set.count > n + 2 {
        FormulaDerivative::Degenerate(Degeneracy::ExtraPoint)
    } else if !set.is_regular(n) {
        FormulaDerivative::Degenerate(Degeneracy::MissingEndpoint)
    } else {
        FormulaDerivative::Value(error_derivative(sol)?.En_prime)
    };
    // Keep the stencil inside (-1, 1).
    let h = cfg.fd_step.min(0.5 * (1.0 - a.abs()));
    let at = |x: f64| -> Result<f64> {
        let inst = CheckmarkInstance::new(n, x)?;
        Ok(solver
            .solve_from(&inst, &cfg.remez, Some(&sol.reference))?
            .error_level)
    };
    let en_prime_fd = (at(a + h)? - at(a - h)?) / (2.0 * h);
    let dp = sol.poly.derivative();
    Ok(SweepRow {
        alpha: a,
        e: sol.error_level,
        k: set.k,
        l: set.l,
        count: set.count,
        contains_minus_one: set.contains_minus_one,
        contains_plus_one: set.contains_plus_one,
        w: ext.w,
        w_escaped: ext.escaped,
        en_prime_formula,
        en_prime_fd,
        leading_coeff_mono: sol.leading_coeff(),
        slope_minus: dp.eval(-1.0) + 1.0,
        slope_plus: dp.eval(1.0) - 1.0,
        phase_label: label_phase(set, n)?,
    })
}

type RowOutcome = std::result::Result<(SweepRow, MinimaxSolution), SweepFailure>;

fn run_chunk(
    cfg: &SweepConfig,
    solver: &dyn MinimaxSolver,
    range: std::ops::Range<usize>,
) -> Vec<RowOutcome> {
    let mut warm: Option<ReferenceSet> = None;
    range
        .map(|i| {
            let alpha = cfg.alpha(i);
            let outcome = CheckmarkInstance::new(cfg.n, alpha)
                .and_then(|inst| solver.solve_from(&inst, &cfg.remez, warm.as_ref()))
                .and_then(|sol| analyze_row(&sol, cfg, solver).map(|row| (row, sol)));
            match outcome {
                Ok((row, sol)) => {
                    warm = Some(sol.reference.clone());
                    Ok((row, sol))
                }
                Err(e) => {
                    warm = None;
                    Err(SweepFailure {
                        alpha,
                        message: e.to_string(),
                    })
                }
            }
        })
        .collect()
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Sweep> {
    run_sweep_with(cfg, &Remez)
}

/// Solves every grid point. Chunks of [`CHUNK`] points run in parallel, each
/// cold-started at its left edge and warm-started inside, so the output does
/// not depend on the thread count.
pub fn run_sweep_with(cfg: &SweepConfig, solver: &dyn MinimaxSolver) -> Result<Sweep> {
    cfg.validate()?;
    let chunks: Vec<_> = (0..cfg.steps)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(cfg.steps))
        .collect();
    let outcomes: Vec<RowOutcome> = chunks
        .into_par_iter()
        .flat_map_iter(|r| run_chunk(cfg, solver, r))
        .collect();
    let mut sweep = Sweep {
        config: cfg.clone(),
        rows: Vec::with_capacity(cfg.steps),
        solutions: Vec::with_capacity(cfg.steps),
        failures: Vec::new(),
    };
    for o in outcomes {
        match o {
            Ok((row, sol)) => {
                sweep.rows.push(row);
                sweep.solutions.push(sol);
            }
            Err(f) => sweep.failures.push(f),
        }
    }
    if sweep.failures.len() * 100 > cfg.steps {
        return Err(Error::SweepFailed {
            failed: sweep.failures.len(),
            total: cfg.steps,
        });
    }
    Ok(sweep)
}

/// One gap-free stretch of constant alternation pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySegment {
    pub k: usize,
    pub l: usize,
    pub contains_minus_one: bool,
    pub contains_plus_one: bool,
    /// `u[j]` is the trajectory of `u_{j+1}`, as `(alpha, position)` pairs.
    pub u: Vec<Vec<(f64, f64)>>,
    pub v: Vec<Vec<(f64, f64)>>,
    pub alpha: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub alpha: f64,
    pub point: String,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectories {
    pub segments: Vec<TrajectorySegment>,
    pub violations: Vec<MonotoneViolation>,
    /// Largest backward step seen (0 when all trajectories are monotone).
    pub max_backstep: f64,
}

fn min_gap(set: &AlternationSet) -> f64 {
    set.points
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

fn new_segment(set: &AlternationSet) -> TrajectorySegment {
    TrajectorySegment {
        k: set.k,
        l: set.l,
        contains_minus_one: set.contains_minus_one,
        contains_plus_one: set.contains_plus_one,
        u: vec![Vec::new(); set.k],
        v: vec![Vec::new(); set.l],
        alpha: Vec::new(),
    }
}

/// Matches `u_j` and `v_j` between consecutive rows by their order on each
/// side of `alpha`, splitting whenever the pattern changes or a grid point
/// is missing.
pub fn track_trajectories(sweep: &Sweep) -> Result<Trajectories> {
    let cfg = &sweep.config;
    let spacing = (cfg.alpha_max - cfg.alpha_min) / (cfg.steps - 1) as f64;
    let mut segments: Vec<TrajectorySegment> = Vec::new();
    let mut violations = Vec::new();
    let mut max_backstep: f64 = 0.0;
    let mut prev: Option<(&SweepRow, &AlternationSet)> = None;

    for (row, sol) in sweep.rows.iter().zip(&sweep.solutions) {
        let set = &sol.alternation;
        let continues = prev.is_some_and(|(p, _)| {
            p.pattern() == row.pattern() && (row.alpha - p.alpha) < 1.5 * spacing
        });
        if !continues {
            segments.push(new_segment(set));
        } else {
            let (p, pset) = prev.expect("checked above");
            let half_gap = 0.5 * min_gap(pset);
            let named = |side: &str, j: usize| format!("{side}{}", j + 1);
            let pairs = pset
                .left_points()
                .into_iter()
                .zip(set.left_points())
                .enumerate()
                .map(|(j, ab)| (named("u", j), ab))
                .chain(
                    pset.right_points()
                        .into_iter()
                        .zip(set.right_points())
                        .enumerate()
                        .map(|(j, ab)| (named("v", j), ab)),
                )
                .chain(std::iter::once(("alpha".to_string(), (p.alpha, row.alpha))));
            for (name, (before, after)) in pairs {
                let step = after - before;
                if step.abs() > half_gap && name != "alpha" {
                    return Err(Error::Resolution { alpha: row.alpha });
                }
                if step < 0.0 {
                    max_backstep = max_backstep.max(-step);
                    if -step > MONOTONE_SLACK {
                        violations.push(MonotoneViolation {
                            alpha: row.alpha,
                            point: name,
                            step,
                        });
                    }
                }
            }
        }
        let seg = segments.last_mut().expect("pushed above");
        for (j, x) in set.left_points().into_iter().enumerate() {
            seg.u[j].push((row.alpha, x));
        }
        for (j, x) in set.right_points().into_iter().enumerate() {
            seg.v[j].push((row.alpha, x));
        }
        seg.alpha.push((row.alpha, row.alpha));
        prev = Some((row, set));
    }
    Ok(Trajectories {
        segments,
        violations,
        max_backstep,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// `max |E(a) - E(-a)|` against the mirrored sweep, when one was given.
    pub max_symmetry_defect: Option<f64>,
    /// Largest relative gap between the closed-form and finite-difference
    /// derivatives over rows where the formula applies.
    pub max_derivative_mismatch: f64,
    pub degenerate_rows: usize,
    pub max_monotone_backstep: f64,
}

/// Relative derivative mismatch with a floor on the denominator: where
/// `E'` passes through zero the finite-difference noise is measured
/// against `E / scale` instead.
pub fn derivative_mismatch(formula: f64, fd: f64, e: f64) -> f64 {
    (formula - fd).abs() / fd.abs().max(formula.abs()).max(1e-3 * e)
}

pub fn consistency_report(sweep: &Sweep, mirror: Option<&Sweep>) -> Result<ConsistencyReport> {
    let max_symmetry_defect = mirror.map(|m| {
        let mut worst: f64 = 0.0;
        for row in &sweep.rows {
            // Mirror rows sit at -alpha up to rounding of the grid formula.
            if let Some(other) = m.rows.iter().find(|r| (r.alpha + row.alpha).abs() < 1e-12) {
                worst = worst.max((other.e - row.e).abs());
            }
        }
        worst
    });
    let mut max_derivative_mismatch: f64 = 0.0;
    let mut degenerate_rows = 0;
    for row in &sweep.rows {
        match row.en_prime_formula {
            FormulaDerivative::Value(f) => {
                max_derivative_mismatch =
                    max_derivative_mismatch.max(derivative_mismatch(f, row.en_prime_fd, row.e));
            }
            FormulaDerivative::Degenerate(_) => degenerate_rows += 1,
        }
    }
    let traj = track_trajectories(sweep)?;
    Ok(ConsistencyReport {
        max_symmetry_defect,
        max_derivative_mismatch,
        degenerate_rows,
        max_monotone_backstep: traj.max_backstep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_closed_form() {
        let sweep = run_sweep(&SweepConfig::new(1, -0.9, 0.9, 181)).unwrap();
        assert_eq!(sweep.rows.len(), 181);
        for r in &sweep.rows {
            assert!((r.e - (1.0 - r.alpha * r.alpha) / 2.0).abs() < 1e-10);
        }
        let rep = consistency_report(&sweep, None).unwrap();
        assert!(rep.max_derivative_mismatch <= 1e-8, "{rep:?}");
        assert_eq!(rep.degenerate_rows, 0);
        let t = track_trajectories(&sweep).unwrap();
        assert_eq!(t.segments.len(), 1);
        assert!(t.segments[0].u.is_empty() && t.segments[0].v.is_empty());
    }

    #[test]
    fn near_plus_one_pattern() {
        let sweep = run_sweep(&SweepConfig::new(5, 0.90, 0.99, 91)).unwrap();
        for r in &sweep.rows {
            assert_eq!(
                (r.k, r.l, r.contains_minus_one, r.contains_plus_one),
                (4, 0, true, true)
            );
        }
        let t = track_trajectories(&sweep).unwrap();
        assert!(t.violations.is_empty(), "{:?}", t.violations);
    }

    #[test]
    fn mirrored_sweep_matches() {
        let cfg = SweepConfig::new(4, 0.1, 0.6, 51);
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg.mirrored()).unwrap();
        let rep = consistency_report(&a, Some(&b)).unwrap();
        assert!(rep.max_symmetry_defect.unwrap() <= 1e-10, "{rep:?}");
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = SweepConfig::new(3, -0.5, 0.5, 150);
        let a = run_sweep(&cfg).unwrap().to_csv();
        let b = run_sweep(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for line in lines {
            assert_eq!(line.split(',').count(), 12);
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(SweepConfig::new(3, 0.5, 0.2, 10).validate().is_err());
        assert!(SweepConfig::new(3, -1.0, 0.2, 10).validate().is_err());
        assert!(SweepConfig::new(3, -0.5, 0.2, 1).validate().is_err());
    }
}
