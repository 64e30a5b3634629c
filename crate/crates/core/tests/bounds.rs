mod common;

use common::{ball_count, exact_floor_square, log2, orthant_count};
use wmcap::bounds::{
    bound1_total, capacity_corner, capacity_gray_center, distribution_penalty, evaluate, BoundId, CoverPosition,
    Regime, RegimePolicy,
};
use wmcap::format::{ball_in_cube_threshold, cube_in_ball_threshold, radius_from_psnr};
use wmcap::ImageFormat;

fn small() -> ImageFormat {
    ImageFormat::new(3, 16, 16, 8).unwrap()
}

/// `log2 vol B(n, r)` with `Γ(n/2 + 1)` as an explicit product, `n` even.
fn ball_log2_even(n: usize, r: f64) -> f64 {
    let half = n / 2;
    let log2_fact: f64 = (1..=half).map(|k| (k as f64).log2()).sum();
    half as f64 * std::f64::consts::PI.log2() + n as f64 * r.log2() - log2_fact
}

#[test]
fn totals() {
    assert_eq!(bound1_total(small()).bits, 6144.0);
    let big = ImageFormat::new(3, 256, 256, 8).unwrap();
    assert_eq!(bound1_total(big).bits, 1_572_864.0);
    assert_eq!(bound1_total(big).bpp, 8.0);
}

#[test]
fn seams() {
    assert!((cube_in_ball_threshold() - 6.020_599_913_279_624).abs() < 1e-12);
    assert!((ball_in_cube_threshold(small()) - 20.0 * (2.0 * 768f64.sqrt()).log10()).abs() < 1e-12);
    assert!((ball_in_cube_threshold(small()) - 34.874_212_113_6).abs() < 1e-9);
}

#[test]
fn below_first_seam_is_the_whole_cube() {
    let p = RegimePolicy::default();
    for tau in [0.0, 3.0, cube_in_ball_threshold()] {
        let r = capacity_gray_center(small(), tau, &p).unwrap();
        assert_eq!((r.bound_id, r.bits), (BoundId::B2, 6144.0));
        assert_eq!(r.regime, Regime::CubeInBall);
    }
}

#[test]
fn volume_bound_matches_factorial_formula() {
    let p = RegimePolicy::default();
    for tau in [35.0, 40.0, 45.0, 55.0] {
        let r = capacity_gray_center(small(), tau, &p).unwrap();
        assert_eq!(r.bound_id, BoundId::B3);
        let eps = radius_from_psnr(small(), tau).unwrap();
        assert!((r.bits - ball_log2_even(768, eps)).abs() < 1e-8);
        let c = capacity_corner(small(), tau, &p).unwrap();
        assert_eq!(c.bound_id, BoundId::B7);
        // One bit per pixel below the centre, floored at zero bits.
        assert!((c.bits - (r.bits - 768.0).max(0.0)).abs() < 1e-9);
    }
}

#[test]
fn dispatched_capacities_are_never_negative() {
    let p = RegimePolicy::default();
    // Just below the count cap the raw volume form is well under zero.
    let raw = evaluate(small(), 61.0, BoundId::B3, &p).unwrap();
    assert!(raw.bits < -70.0);
    let center = capacity_gray_center(small(), 61.0, &p).unwrap();
    assert_eq!((center.bound_id, center.bits, center.bpp), (BoundId::B3, 0.0, 0.0));
    for tau in (50..=80).map(f64::from) {
        assert!(capacity_gray_center(small(), tau, &p).unwrap().bits >= 0.0);
        assert!(capacity_corner(small(), tau, &p).unwrap().bits >= 0.0);
    }
}

#[test]
fn counting_bounds_match_theta_series() {
    let p = RegimePolicy::default();
    for tau in [61.5, 63.0, 66.0, 70.0, 75.0] {
        let eps = radius_from_psnr(small(), tau).unwrap();
        let r2 = exact_floor_square(eps);
        let center = capacity_gray_center(small(), tau, &p).unwrap();
        assert_eq!(center.bound_id, BoundId::B4);
        assert!((center.bits - log2(&ball_count(768, r2))).abs() < 1e-9, "tau {tau}");
        let corner = capacity_corner(small(), tau, &p).unwrap();
        assert_eq!((corner.bound_id, corner.cover_position), (BoundId::B8, CoverPosition::Corner));
        assert!((corner.bits - log2(&orthant_count(768, r2))).abs() < 1e-9, "tau {tau}");
    }
}

#[test]
fn known_values() {
    let p = RegimePolicy::default();
    let b4 = capacity_gray_center(small(), 61.5, &p).unwrap().bits;
    assert!((b4 - 236.4498).abs() < 1e-3);
    let b8 = capacity_corner(small(), 61.5, &p).unwrap().bits;
    assert!((b8 - 201.4894).abs() < 1e-3);
}

#[test]
fn roughly_two_thousand_bits_at_45_db() {
    let r = capacity_gray_center(small(), 45.0, &RegimePolicy::default()).unwrap();
    assert!((r.bits - 2000.0).abs() <= 200.0, "{}", r.bits);
    assert!(r.bpp > 2.5);
}

#[test]
fn very_high_psnr_leaves_only_the_cover() {
    let p = RegimePolicy::default();
    let r = capacity_gray_center(small(), 80.0, &p).unwrap();
    assert_eq!(r.bits, 0.0);
    assert_eq!(capacity_corner(small(), 80.0, &p).unwrap().bits, 0.0);
}

#[test]
fn intermediate_regime_lies_between_neighbours() {
    let p = RegimePolicy::default();
    let f = ImageFormat::new(1, 4, 4, 8).unwrap();
    let r = capacity_gray_center(f, 12.0, &p).unwrap();
    assert_eq!(r.bound_id, BoundId::B5);
    assert!(r.bits <= 128.0);
    let b3 = evaluate(f, 12.0, BoundId::B3, &p).unwrap().bits;
    assert!(r.bits <= b3 + 1e-9);
    let b6 = evaluate(f, 12.0, BoundId::B6, &p).unwrap().bits;
    assert!(r.bits <= b6 + 1e-9);
}

/// Nonincreasing in τ away from the seams, where the bound in use changes.
#[test]
fn center_and_corner_are_monotone_between_seams() {
    let p = RegimePolicy::default();
    let f = ImageFormat::new(1, 4, 4, 8).unwrap();
    let count_seam = 20.0 * (255.0 * 4.0 / p.max_count_radius).log10();
    let seams = [cube_in_ball_threshold(), ball_in_cube_threshold(f), count_seam];
    let taus: Vec<f64> =
        (0..=160).map(|i| i as f64 * 0.5).filter(|t| seams.iter().all(|s| (t - s).abs() > 1.0)).collect();
    let mut prev: Option<(f64, f64, f64)> = None;
    for &tau in &taus {
        let c = capacity_gray_center(f, tau, &p).unwrap().bits;
        let k = capacity_corner(f, tau, &p).unwrap().bits;
        if let Some((pt, pc, pk)) = prev {
            let crossed = seams.iter().any(|s| pt < *s && *s < tau);
            if !crossed {
                assert!(c <= pc + 1e-9, "center rose at {tau}");
                assert!(k <= pk + 1e-9, "corner rose at {tau}");
            }
        }
        assert!(k <= c + 1e-9, "corner above center at {tau}");
        prev = Some((tau, c, k));
    }
}

#[test]
fn corner_penalty_at_most_one_bit_per_pixel() {
    let p = RegimePolicy::default();
    for tau in [40.0, 50.0] {
        let gap =
            capacity_gray_center(small(), tau, &p).unwrap().bits - capacity_corner(small(), tau, &p).unwrap().bits;
        assert!((0.0..=768.0 + 1e-6).contains(&gap), "tau {tau}: gap {gap}");
    }
}

#[test]
fn min_upper_fallback_above_numeric_cap() {
    let p = RegimePolicy { max_numeric_dim: 100, ..RegimePolicy::default() };
    let r = capacity_gray_center(small(), 20.0, &p).unwrap();
    assert_eq!((r.bound_id, r.regime), (BoundId::B6, Regime::MinUpper));
    assert!(r.bits <= 6144.0);
    let c = capacity_corner(small(), 20.0, &p).unwrap();
    assert_eq!(c.regime, Regime::MinUpper);
    assert!(c.bits <= 6144.0);
}

#[test]
fn every_psnr_bound_evaluates() {
    let p = RegimePolicy::default();
    let f = ImageFormat::new(1, 3, 3, 8).unwrap();
    for id in BoundId::PSNR_ONLY {
        let r = evaluate(f, 30.0, id, &p).unwrap();
        assert!(r.bits.is_finite(), "{id}");
        assert_eq!(r.bound_id, id);
    }
    assert!(evaluate(f, 30.0, BoundId::B12, &p).is_err());
}

#[test]
fn distribution_penalty_example() {
    assert_eq!(distribution_penalty(32 * 32, 1024).unwrap(), 10240.0);
    assert!(distribution_penalty(0, 2).is_err());
}
