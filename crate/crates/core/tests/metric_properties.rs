//! Invariants of `D`, the bounded-Lipschitz norm and the quotient metric.

mod common;

use common::*;
use hs_core::lagrangian::lag_comparison_norm;
use hs_core::metric::{bounded_lipschitz, quotient_metric, semi_metric_d, DOptions, GVariant, W1InfNorm};
use hs_core::piecewise::{Atom, SignedMeasure};
use hs_core::transform::to_lagrangian;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const TOL_METRIC: f64 = 1e-9;
/// The LP is solved on a discretisation; relative slack for comparisons
/// between different measures.
const TOL_BL: f64 = 1e-6;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn scaled(m: &SignedMeasure, c: f64) -> SignedMeasure {
    let atoms = m.atoms().iter().map(|a| Atom { x: a.x, mass: c * a.mass }).collect();
    SignedMeasure::new(m.density().map(|v| c * v), atoms, &tol()).unwrap()
}

fn bl(m: &SignedMeasure, norm: W1InfNorm) -> f64 {
    bounded_lipschitz(m, norm).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn d_vanishes_on_the_diagonal_and_is_symmetric(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let a = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let b = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let constant = a.alpha().constant_value().is_some() && b.alpha().constant_value().is_some();
        let variants: &[GVariant] = if constant { &[GVariant::General, GVariant::ConstantAlpha] } else { &[GVariant::General] };
        for &variant in variants {
            let o = DOptions { alpha_term: true, variant };
            prop_assert_eq!(semi_metric_d(&a, &a, &o, &t).unwrap().total, 0.0);
            let ab = semi_metric_d(&a, &b, &o, &t).unwrap().total;
            let ba = semi_metric_d(&b, &a, &o, &t).unwrap().total;
            prop_assert!((ab - ba).abs() <= TOL_METRIC * ab.max(1.0), "{} vs {}", ab, ba);
        }
    }

    #[test]
    fn d_dominates_its_own_sup_terms(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let a = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let b = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let r = semi_metric_d(&a, &b, &DOptions::default(), &t).unwrap();
        let dy = sup_diff_pl(a.y(), b.y());
        let du = sup_diff_pl(a.u(), b.u());
        prop_assert!((r.dy_sup - dy).abs() <= TOL_METRIC && (r.du_sup - du).abs() <= TOL_METRIC);
        prop_assert!(r.total + TOL_METRIC >= r.dy_sup + r.du_sup + r.dh_sup + r.dalpha);
        prop_assert!(r.g_l1 >= 0.0 && r.g_l2 >= 0.0);
        let off = semi_metric_d(&a, &b, &DOptions { alpha_term: false, variant: GVariant::General }, &t).unwrap();
        prop_assert!((r.total - off.total - r.dalpha).abs() <= TOL_METRIC);
    }

    #[test]
    fn comparison_norm_lower_bound_sits_below_identity_witness(seed in any::<u64>()) {
        // (2/5)‖X_A − X_B‖ ≤ J ≤ D(X_A, X_B) + D(X_A, X_B) with f = g = id
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let a = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let b = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let d = semi_metric_d(&a, &b, &DOptions::default(), &t).unwrap().total;
        prop_assert!(0.4 * lag_comparison_norm(&a, &b) <= 2.0 * d + TOL_METRIC);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn bounded_lipschitz_is_a_norm(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let m = random_signed_measure(&mut rng);
        let n = random_signed_measure(&mut rng);
        for norm in [W1InfNorm::Max, W1InfNorm::Sum] {
            let (bm, bn) = (bl(&m, norm), bl(&n, norm));
            prop_assert!(bm >= 0.0);
            prop_assert!((bl(&scaled(&m, -1.0), norm) - bm).abs() <= TOL_BL * bm.max(1.0));
            prop_assert!((bl(&scaled(&m, c), norm) - c.abs() * bm).abs() <= TOL_BL * bm.max(1.0));
            // m + n = m − (−n)
            let sum = m.minus(&scaled(&n, -1.0), &t);
            prop_assert!(bl(&sum, norm) <= bm + bn + TOL_BL * (bm + bn).max(1.0));
            // |m(ℝ)| ≤ ‖m‖ ≤ |m|(ℝ): constants and 1-bounded functions
            let total: f64 = m.density().integral().unwrap() + m.atoms().iter().map(|a| a.mass).sum::<f64>();
            prop_assert!(total.abs() <= bm + TOL_BL);
            prop_assert!(bm <= m.total_variation() + TOL_BL);
        }
        // the sum norm is the larger W^{1,∞} norm, hence the smaller dual norm
        prop_assert!(bl(&m, W1InfNorm::Sum) <= bl(&m, W1InfNorm::Max) + TOL_BL);
    }

    #[test]
    fn bounded_lipschitz_of_a_dipole(x in -2.0f64..2.0, h in 0.0f64..3.0, w in 0.1f64..2.0) {
        // ‖w(δ_x − δ_{x+h})‖ = w·min(h, 2) in the max convention
        let t = tol();
        let m = SignedMeasure::new(
            hs_core::PwConstant::zero(),
            vec![Atom { x, mass: w }, Atom { x: x + h, mass: -w }],
            &t,
        ).unwrap();
        let expect = if h == 0.0 { 0.0 } else { w * h.min(2.0) };
        prop_assert!((bl(&m, W1InfNorm::Max) - expect).abs() <= 1e-7 * w.max(1.0), "{} vs {}", bl(&m, W1InfNorm::Max), expect);
    }

    #[test]
    fn quotient_metric_is_the_largest_metric_below_the_table(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut f = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..5.0) };
                f[i][j] = v;
                f[j][i] = v;
            }
        }
        let d = quotient_metric(&f, None).unwrap();
        let brute = chain_enumeration(&f);
        for i in 0..n {
            prop_assert_eq!(d[i][i], 0.0);
            for j in 0..n {
                prop_assert!(d[i][j] <= f[i][j] + TOL_METRIC);
                prop_assert!((d[i][j] - d[j][i]).abs() <= TOL_METRIC);
                prop_assert!((d[i][j] - brute[i][j]).abs() <= TOL_METRIC);
                for k in 0..n {
                    prop_assert!(d[i][k] <= d[i][j] + d[j][k] + TOL_METRIC);
                }
            }
        }
        // a metric is its own quotient
        let again = quotient_metric(&d, None).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((again[i][j] - d[i][j]).abs() <= TOL_METRIC);
            }
        }
    }
}
