use checkmark_core::oracle::discrete_minimax;
use checkmark_core::remez::remez_solve_from;
use checkmark_core::{
    g_eval, remez_solve, CheckmarkInstance, MinimaxSolution, Polynomial, RemezConfig,
};
use proptest::prelude::*;

fn solve(n: usize, a: f64) -> MinimaxSolution {
    remez_solve(
        &CheckmarkInstance::new(n, a).unwrap(),
        &RemezConfig::default(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_round_trip(coeffs in prop::collection::vec(-1.0f64..1.0, 1..=13)) {
        let p = Polynomial::chebyshev(coeffs.clone());
        let back = p.to_monomial().to_chebyshev();
        let scale = coeffs.iter().fold(1e-300f64, |m, c| m.max(c.abs()));
        for (a, b) in coeffs.iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn mirror_symmetry(n in 1usize..=9, a in -0.95f64..0.95) {
        let p = solve(n, a);
        let q = solve(n, -a);
        prop_assert!((p.error_level - q.error_level).abs() <= 1e-12);
        let pm = p.poly.to_monomial();
        let qm = q.poly.to_monomial();
        for (j, (x, y)) in pm.coeffs().iter().zip(qm.coeffs()).enumerate() {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((x - s * y).abs() <= 1e-10, "c_{j}: {x} vs {y}");
        }
    }

    #[test]
    fn normalized_error_is_bounded(n in 1usize..=10, a in -0.97f64..0.97) {
        let sol = solve(n, a);
        prop_assert!((sol.poly.eval(a) - sol.error_level).abs() <= 1e-10 * sol.error_level);
        prop_assert_eq!(sol.alternation.signs[sol.alternation.points.iter().position(|&x| x == a).unwrap()], -1);
        for i in 0..=4000 {
            let x = -1.0 + i as f64 / 2000.0;
            prop_assert!(g_eval(&sol, x).unwrap().abs() <= 1.0 + 1e-10);
        }
        let count = sol.alternation.count;
        prop_assert!(count == n + 2 || count == n + 3);
    }

    #[test]
    fn error_decreases_with_degree(n in 1usize..=10, a in -0.95f64..0.95) {
        prop_assert!(solve(n + 1, a).error_level <= solve(n, a).error_level + 1e-12);
    }

    #[test]
    fn warm_and_cold_agree(n in 2usize..=8, a in -0.9f64..0.9, step in -2e-3f64..2e-3) {
        let cfg = RemezConfig::default();
        let near = solve(n, a);
        let inst = CheckmarkInstance::new(n, a + step).unwrap();
        let warm = remez_solve_from(&inst, &cfg, Some(&near.reference)).unwrap();
        let cold = remez_solve(&inst, &cfg).unwrap();
        prop_assert!((warm.error_level - cold.error_level).abs() <= 1e-11);
    }

    #[test]
    fn oracle_is_a_lower_bound(n in 0usize..=4, a in -0.9f64..0.9) {
        let inst = CheckmarkInstance::new(n, a).unwrap();
        let o = discrete_minimax(&inst, 256).unwrap();
        let e = if n == 0 { (1.0 + a.abs()) / 2.0 } else { solve(n, a).error_level };
        prop_assert!(o.e_lower <= e + 1e-12, "{} > {e}", o.e_lower);
        prop_assert!(e - o.e_lower <= 1e-3);
    }
}
