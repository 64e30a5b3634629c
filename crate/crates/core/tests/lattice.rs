mod common;

use common::{ball_count, exact_floor_square, log2, orthant_count};
use proptest::prelude::*;
use wmcap::lattice::{bounded_count, brute_force_count, floor_square, mitchell_count, DEFAULT_WORK_BUDGET};

#[test]
fn counts_match_generating_function() {
    for dim in 1..=6 {
        for r2 in 0..=40u64 {
            // sqrt can round below the true root, so the oracle squares
            // the double that is actually passed.
            let r = (r2 as f64).sqrt();
            let expected = ball_count(dim, exact_floor_square(r));
            assert_eq!(mitchell_count(dim, r).unwrap().count, expected, "dim {dim} r² {r2}");
        }
    }
}

#[test]
fn three_counters_agree_in_low_dimension() {
    for dim in 1..=5 {
        for half in 1..=16 {
            let r = half as f64 * 0.5;
            let m = mitchell_count(dim, r).unwrap().count;
            let b = brute_force_count(dim, r, DEFAULT_WORK_BUDGET).unwrap().count;
            let wide = vec![(-100.0, 100.0); dim];
            let c = bounded_count(r, &wide).unwrap().count;
            assert_eq!(m, b, "dim {dim} r {r}");
            assert_eq!(m, c, "dim {dim} r {r}");
        }
    }
}

#[test]
fn high_dimension_matches_theta_power() {
    for (dim, r2) in [(768, 36), (768, 9), (300, 20), (2000, 4)] {
        let r = (r2 as f64).sqrt();
        let r2 = exact_floor_square(r);
        let got = mitchell_count(dim, r).unwrap();
        let expected = ball_count(dim, r2);
        assert_eq!(got.count, expected);
        assert!((got.log2_count - log2(&expected)).abs() < 1e-9);
    }
}

#[test]
fn orthant_counts() {
    for (dim, r2) in [(3, 10), (768, 36), (50, 17)] {
        let r = (r2 as f64).sqrt();
        let r2 = exact_floor_square(r);
        let bounds = vec![(0.0, 255.0); dim];
        assert_eq!(bounded_count(r, &bounds).unwrap().count, orthant_count(dim, r2));
    }
}

#[test]
fn floor_square_is_exact_for_the_double() {
    for k in 0..2000u64 {
        assert_eq!(floor_square(k as f64).unwrap(), k * k);
        let r = (k as f64).sqrt();
        assert_eq!(floor_square(r).unwrap(), exact_floor_square(r), "k {k}");
        let up = f64::from_bits(r.to_bits() + 1);
        assert_eq!(floor_square(up).unwrap(), exact_floor_square(up), "k {k}");
    }
}

proptest! {
    #[test]
    fn count_is_monotone_in_radius(dim in 1usize..8, r in 0.0f64..5.0, dr in 0.0f64..2.0) {
        let a = mitchell_count(dim, r).unwrap().count;
        let b = mitchell_count(dim, r + dr).unwrap().count;
        prop_assert!(a <= b);
    }

    #[test]
    fn bounded_never_exceeds_ball(dim in 1usize..5, r in 0.0f64..4.0, lo in -3i32..1, width in 0i32..5) {
        let bounds = vec![(f64::from(lo), f64::from(lo + width)); dim];
        let boxed = bounded_count(r, &bounds).unwrap().count;
        prop_assert!(boxed <= mitchell_count(dim, r).unwrap().count);
        let brute = brute_force_count(dim, r, DEFAULT_WORK_BUDGET).unwrap();
        prop_assert!(boxed <= brute.count);
    }
}
