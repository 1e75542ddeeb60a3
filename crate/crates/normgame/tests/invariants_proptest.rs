//! Property tests for the primitive objects.

use normgame::{
    income_weights, position_transition_matrix, savitzky_golay, state_transition_matrix,
    ContributionNorm, Utility,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn weights_sum_to_one_and_decrease(n in 2usize..8, alpha in 0.0f64..30.0) {
        let w = income_weights(n, alpha).unwrap();
        let total: f64 = w.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for pair in w.windows(2) {
            prop_assert!(pair[1] <= pair[0]);
            if alpha > 0.0 {
                prop_assert!(pair[1] < pair[0]);
            }
        }
    }

    #[test]
    fn weight_log_ratio_equals_alpha(n in 2usize..8, alpha in 0.0f64..30.0) {
        let w = income_weights(n, alpha).unwrap();
        for pair in w.windows(2) {
            prop_assert!((pair[0].ln() - pair[1].ln() - alpha).abs() <= 1e-10);
        }
    }

    #[test]
    fn utility_monotone_and_concave(
        rho in 0.05f64..5.0,
        a in 0.01f64..10.0,
        gap in 0.01f64..5.0,
    ) {
        let u = Utility::new(rho).unwrap();
        let b = a + gap;
        let ua = u.eval(a).unwrap();
        let ub = u.eval(b).unwrap();
        prop_assert!(ub > ua);
        let mid = u.eval(0.5 * (a + b)).unwrap();
        prop_assert!(mid > 0.5 * (ua + ub));
    }

    #[test]
    fn norm_share_monotonicities(
        beta in 0.01f64..6.0,
        extra in 0.01f64..2.0,
        w in 0.01f64..0.99,
    ) {
        let norm = ContributionNorm::new(beta).unwrap();
        let steeper = ContributionNorm::new(beta + extra).unwrap();
        // increasing in w for fixed beta > 0
        prop_assert!(norm.share(w) < norm.share((w + 0.01).min(1.0)));
        // decreasing in beta for fixed w in (0, 1)
        prop_assert!(steeper.share(w) < norm.share(w));
        prop_assert!((0.0..=1.0).contains(&norm.share(w)));
    }

    #[test]
    fn transition_matrices_stochastic_and_symmetric(n in 2usize..7, m in 0.0f64..1.0) {
        let p = position_transition_matrix(n, m).unwrap();
        let s = state_transition_matrix(n, m).unwrap();
        for matrix in [&p, &s] {
            for (i, row) in matrix.iter().enumerate() {
                let total: f64 = row.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-12);
                for (j, v) in row.iter().enumerate() {
                    prop_assert!(*v >= 0.0);
                    prop_assert!((*v - matrix[j][i]).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn savgol_smoothing_is_exact_on_cubics(
        c0 in -2.0f64..2.0,
        c1 in -1.0f64..1.0,
        c2 in -0.1f64..0.1,
        c3 in -0.01f64..0.01,
    ) {
        let series: Vec<f64> = (0..40)
            .map(|i| {
                let x = i as f64;
                c0 + c1 * x + c2 * x * x + c3 * x * x * x
            })
            .collect();
        let smoothed = savitzky_golay(&series, 9, 3).unwrap();
        for (a, b) in series.iter().zip(&smoothed) {
            prop_assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0));
        }
    }
}
