//! Invariants of the Eulerian ↔ Lagrangian maps and of relabelling.

mod common;

use common::*;
use hs_core::lagrangian::validate_lagrangian;
use hs_core::transform::{is_relabelling_of, to_eulerian, to_lagrangian};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const TOL_ROUNDTRIP: f64 = 1e-9;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lhat_lands_in_f0_and_validates(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let y = random_state(&mut rng);
        let x = to_lagrangian(&y, &t).unwrap();
        prop_assert!(x.in_f0(&t), "y + H − id = {:e}", x.f0_defect());
        let report = validate_lagrangian(&x, &t, false);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
        // total masses are carried by the tails of V and H
        prop_assert!((x.v_inf() - y.mu.total_mass()).abs() <= TOL_ROUNDTRIP);
        prop_assert!((x.h().tail_values().1 - y.nu.total_mass()).abs() <= TOL_ROUNDTRIP);
    }

    #[test]
    fn m_after_lhat_is_identity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let y = random_state(&mut rng);
        let back = to_eulerian(&to_lagrangian(&y, &t).unwrap(), &t).unwrap();
        prop_assert!(sup_diff_pl(&back.u, &y.u) <= TOL_ROUNDTRIP);
        prop_assert!(back.mu.cdf_sup_distance(&y.mu, &t) <= TOL_ROUNDTRIP);
        prop_assert!(back.nu.cdf_sup_distance(&y.nu, &t) <= TOL_ROUNDTRIP);
        prop_assert_eq!(back.alpha, y.alpha);
    }

    #[test]
    fn relabelling_does_not_change_the_eulerian_state(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let x = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let f = random_relabelling(&mut rng, 6);
        let xf = x.relabel(&f, &t).unwrap();
        let (a, b) = (to_eulerian(&x, &t).unwrap(), to_eulerian(&xf, &t).unwrap());
        prop_assert!(sup_diff_pl(&a.u, &b.u) <= TOL_ROUNDTRIP);
        prop_assert!(a.mu.cdf_sup_distance(&b.mu, &t) <= TOL_ROUNDTRIP);
        prop_assert!(a.nu.cdf_sup_distance(&b.nu, &t) <= TOL_ROUNDTRIP);
    }

    #[test]
    fn relabel_then_inverse_restores_state(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let x = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let f = random_relabelling(&mut rng, 6);
        let back = x.relabel(&f, &t).unwrap().relabel(&f.inverse(&t).unwrap(), &t).unwrap();
        prop_assert!(lag_sup_diff(&back, &x) <= TOL_ROUNDTRIP);
    }

    #[test]
    fn normalisation_forgets_the_relabelling(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let x = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let xf = x.relabel(&random_relabelling(&mut rng, 6), &t).unwrap();
        let (px, _) = x.pi_normalize(&t).unwrap();
        let (pf, _) = xf.pi_normalize(&t).unwrap();
        prop_assert!(pf.in_f0(&t));
        prop_assert!(lag_sup_diff(&px, &pf) <= TOL_ROUNDTRIP);
    }

    #[test]
    fn relabelled_copies_are_recognised(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let x = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let f = random_relabelling(&mut rng, 6);
        let xf = x.relabel(&f, &t).unwrap();
        let g = is_relabelling_of(&x, &xf, &t);
        prop_assert!(g.is_some());
        // the recovered map reproduces X∘f
        let again = x.relabel(&g.unwrap(), &t).unwrap();
        prop_assert!(lag_sup_diff(&again, &xf) <= TOL_ROUNDTRIP);
    }

    #[test]
    fn lhat_after_m_is_a_relabelling_for_admissible_alpha(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = tol();
        let x = to_lagrangian(&random_state(&mut rng), &t).unwrap();
        let xf = x.relabel(&random_relabelling(&mut rng, 6), &t).unwrap();
        let back = to_lagrangian(&to_eulerian(&xf, &t).unwrap(), &t).unwrap();
        prop_assert!(is_relabelling_of(&back, &xf, &t).is_some());
    }
}
