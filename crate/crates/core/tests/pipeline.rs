//! End-to-end checks that cross module boundaries.

use checkmark_core::analysis::{error_derivative, external_extremum, vandermonde_quantities};
use checkmark_core::extremal::newton_refine;
use checkmark_core::phases::{label_phase, PhaseLabel};
use checkmark_core::sweep::{
    consistency_report, run_sweep, run_sweep_with, track_trajectories, SweepConfig,
};
use checkmark_core::{remez_solve, CheckmarkInstance, Error, RemezConfig, SolverRegistry};

fn solve(n: usize, a: f64) -> checkmark_core::MinimaxSolution {
    remez_solve(
        &CheckmarkInstance::new(n, a).unwrap(),
        &RemezConfig::default(),
    )
    .unwrap()
}

#[test]
fn final_phase_near_plus_one() {
    let sol = solve(5, 0.95);
    let set = &sol.alternation;
    assert_eq!((set.k, set.l), (4, 0));
    assert!(set.contains_minus_one && set.contains_plus_one);
    assert_eq!(label_phase(set, 5).unwrap(), PhaseLabel::Outside);
}

#[test]
fn phase_four_pattern() {
    let set = solve(5, 0.75).alternation;
    assert_eq!((set.k, set.l, set.count), (3, 1, 7));
    let w = external_extremum(&solve(5, 0.75)).unwrap();
    assert!(w.w.unwrap() < -1.0);
}

#[test]
fn vandermonde_identities_hold_broadly() {
    for n in 2..=8 {
        for j in 0..50 {
            let a = -0.98 + 1.96 * j as f64 / 49.0;
            let sol = solve(n, a);
            if !sol.alternation.is_regular(n) {
                continue;
            }
            let q = vandermonde_quantities(&sol.alternation, a).unwrap();
            let (dm, dp) = q.identity_defects();
            assert!(dm <= 1e-10 && dp <= 1e-10, "n={n} a={a}: {dm:e} {dp:e}");
            let r = error_derivative(&sol).unwrap();
            assert!(r.route_mismatch(sol.error_level) <= 1e-12);
        }
    }
}

#[test]
fn external_extremum_is_a_critical_point() {
    for n in 2..=7 {
        for j in 0..40 {
            let a = -0.97 + 1.94 * j as f64 / 39.0;
            let sol = solve(n, a);
            let ext = external_extremum(&sol).unwrap();
            if let Some(w) = ext.w {
                assert!(w.abs() > 1.0);
                let target = if w > 1.0 { 1.0 } else { -1.0 };
                assert!(
                    (sol.poly.derivative().eval(w) - target).abs()
                        <= 1e-10 * w.abs().powi(n as i32 - 1).max(1.0)
                );
            }
        }
    }
}

#[test]
fn trajectories_split_at_tips() {
    // Crosses the tip of the rightmost V-shape of E_5.
    let sweep = run_sweep(&SweepConfig::new(5, 0.70, 0.95, 501)).unwrap();
    let t = track_trajectories(&sweep).unwrap();
    assert!(t.segments.len() >= 3, "{}", t.segments.len());
    assert!(t.violations.is_empty());
    let near_plus_one = t.segments.last().unwrap();
    assert_eq!(near_plus_one.u.len(), 4);
}

#[test]
fn odd_degree_derivative_vanishes_at_zero() {
    let sweep = run_sweep(&SweepConfig::new(5, -0.1, 0.1, 201)).unwrap();
    let nearest = sweep
        .rows
        .iter()
        .min_by(|a, b| a.alpha.abs().total_cmp(&b.alpha.abs()))
        .unwrap();
    let d = nearest.en_prime_formula.value().unwrap();
    assert!(d.abs() <= 1e-6, "{d}");
}

#[test]
fn no_degenerate_rows_outside_vshapes() {
    // Strictly between the two positive-side V-shapes of E_5.
    let sweep = run_sweep(&SweepConfig::new(5, 0.45, 0.75, 121)).unwrap();
    let rep = consistency_report(&sweep, None).unwrap();
    assert_eq!(rep.degenerate_rows, 0);
    assert!(rep.max_derivative_mismatch <= 1e-5);
}

#[test]
fn sweep_through_registry_matches_plain_sweep() {
    let reg = SolverRegistry::default();
    let cfg = SweepConfig::new(4, -0.3, 0.3, 65);
    let a = run_sweep(&cfg).unwrap();
    let b = run_sweep_with(&cfg, reg.get("remez-newton").unwrap().as_ref()).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.e - y.e).abs() <= 1e-12);
        assert_eq!(x.phase_label, y.phase_label);
    }
}

#[test]
fn newton_polishes_regular_and_refuses_tips() {
    let sol = solve(6, 0.3);
    let refined = newton_refine(&sol).unwrap();
    assert!((refined.error_level - sol.error_level).abs() <= 1e-12);
    assert!(matches!(
        newton_refine(&solve(5, 0.7975)),
        Err(Error::RefinementRefused { .. })
    ));
}
