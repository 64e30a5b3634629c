//! One pass/fail line per acceptance criterion, with the tolerances pinned
//! here. Criteria known to be out of reach are still evaluated and printed;
//! only an unexpected failure makes the run exit nonzero.

mod common;

use std::time::Instant;

use common::{ball_count, exact_floor_square, preimage_area, random_map, rect_disk_area};
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmcap::bounds::{capacity_corner, capacity_gray_center, RegimePolicy};
use wmcap::codec::{embed, extract, scheme_for, Message};
use wmcap::format::measure_psnr;
use wmcap::geometry::{ball_volume_log2, box_ball_intersection_log2vol, BoxBallSpec, Precision};
use wmcap::lattice::{bounded_count, brute_force_count, mitchell_count, DEFAULT_WORK_BUDGET};
use wmcap::robust::{
    conservative_capacity, empirical_xi_2d, heuristic_capacity, matmul_2d, preimage_log2_volume, rotation_2d,
};
use wmcap::transforms::{
    crop_rescale, dct8, flip_h, idct8, linjpeg, rgb_to_ycbcr, rotation, singular_spectrum, ycbcr_to_rgb,
    AffineOperator, Quantizer, Rounding,
};
use wmcap::{Image, ImageFormat};

/// Relative tolerance of the horizontal-flip row.
const FLIP_TOLERANCE: f64 = 0.02;
/// Relative tolerance of the other conservative rows.
const ROW_TOLERANCE: f64 = 0.15;
/// Allowance on the corner gap for the exact `n`-bit offset between the
/// volume bounds.
const GAP_SLACK_BITS: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn small() -> ImageFormat {
    ImageFormat::new(3, 16, 16, 8).unwrap()
}

fn big() -> ImageFormat {
    ImageFormat::new(3, 256, 256, 8).unwrap()
}

fn codec_ladder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let gray = Image::gray(big());
    let mut pass = true;
    let mut parts = Vec::new();
    for (tau, expected) in [(36.0, 623_232u64), (38.0, 551_948), (42.0, 456_509), (48.0, 311_616)] {
        let t = Instant::now();
        let s = scheme_for(big(), tau).unwrap();
        let bits = s.floor_capacity_bits;
        let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
        rng.fill_bytes(&mut bytes);
        bytes[0] &= 0xff >> (bytes.len() as u64 * 8 - bits);
        let m = Message::new(BigUint::from_bytes_be(&bytes), bits).unwrap();
        let img = embed(&s, &m).unwrap();
        let psnr = measure_psnr(&img, &gray).unwrap();
        let exact = extract(&s, &img).unwrap() == m;
        let secs = t.elapsed().as_secs_f64();
        let ok = bits == expected && exact && psnr >= tau && secs < 30.0;
        pass &= ok;
        parts.push(format!(
            "{tau} dB: q={} {bits} bits, round trip {}, PSNR {psnr:.2}, {secs:.1}s",
            s.q,
            if exact { "exact" } else { "BROKEN" }
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn psnr_magnitude() -> Outcome {
    let r = capacity_gray_center(small(), 45.0, &RegimePolicy::default()).unwrap();
    Outcome {
        pass: (r.bits - 2000.0).abs() <= 200.0 && r.bpp > 2.5,
        detail: format!("{:.2} bits ({:.3} bpp) via {}, expected 2000 ± 10%", r.bits, r.bpp, r.bound_id),
    }
}

fn corner_penalty() -> Outcome {
    let p = RegimePolicy::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for tau in [20.0, 30.0, 40.0, 50.0] {
        let c = capacity_gray_center(small(), tau, &p).unwrap();
        let k = capacity_corner(small(), tau, &p).unwrap();
        let gap = c.bits - k.bits;
        pass &= (0.0..=768.0 + GAP_SLACK_BITS).contains(&gap);
        parts.push(format!("{tau} dB: {}−{} = {gap:.4}", c.bound_id, k.bound_id));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn lattice_equivalence() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for dim in 1..=5 {
        for half in 1..=16 {
            let r = half as f64 * 0.5;
            let m = mitchell_count(dim, r).unwrap().count;
            let b = brute_force_count(dim, r, DEFAULT_WORK_BUDGET).unwrap().count;
            let c = bounded_count(r, &vec![(-1e3, 1e3); dim]).unwrap().count;
            let g = ball_count(dim, exact_floor_square(r));
            if m != b || m != c || m != g {
                mismatches.push(format!("dim {dim} r {r}"));
            }
            checked += 1;
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{checked} (dim, radius) pairs, 4 counters, mismatches: {mismatches:?}"),
    }
}

fn geometry_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    // (a) box inside the ball: exact product of side lengths
    let mut worst_a: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..30);
        let half = 1.0 / (n as f64).sqrt();
        let axes: Vec<(f64, f64)> =
            (0..n).map(|_| (-rng.gen_range(0.1..1.0) * half, rng.gen_range(0.1..1.0) * half)).collect();
        let k: f64 = axes.iter().map(|(a, b)| (b - a).log2()).sum();
        let got = box_ball_intersection_log2vol(&BoxBallSpec::new(&axes, 1.0)).unwrap().log2_volume;
        worst_a = worst_a.max((got - k).abs());
    }
    // (b) ball inside a box ten times its size
    let mut worst_b: f64 = 0.0;
    for n in [2usize, 5, 10, 50] {
        let got = box_ball_intersection_log2vol(&BoxBallSpec::uniform(n, -10.0, 10.0, 1.0)).unwrap().log2_volume;
        let rel = ((got - ball_volume_log2(n, 1.0).unwrap()) * std::f64::consts::LN_2).exp_m1().abs();
        worst_b = worst_b.max(rel);
    }
    // (c) 2-D quadrature
    let mut worst_c: f64 = 0.0;
    let mut done = 0;
    while done < 20 {
        let r: f64 = rng.gen_range(0.5..5.0);
        let a = [rng.gen_range(-1.5 * r..r), rng.gen_range(-1.5 * r..r)];
        let b = [rng.gen_range(a[0] + 0.05 * r..1.5 * r), rng.gen_range(a[1] + 0.05 * r..1.5 * r)];
        let area = rect_disk_area(a, b, [0.0, 0.0], r, 1e-13);
        if area == 0.0 {
            continue;
        }
        let got =
            box_ball_intersection_log2vol(&BoxBallSpec::new(&[(a[0], b[0]), (a[1], b[1])], r)).unwrap().log2_volume;
        worst_c = worst_c.max(((got - area.log2()) * std::f64::consts::LN_2).exp_m1().abs());
        done += 1;
    }
    Outcome {
        pass: worst_a < 1e-9 && worst_b < 1e-6 && worst_c < 1e-5,
        detail: format!(
            "(a) max |Δlog2| {worst_a:.1e}; (b) max rel {worst_b:.1e}; (c) max rel {worst_c:.1e} over 20 specs"
        ),
    }
}

fn empirical_factors() -> Outcome {
    let q = Quantizer::unbounded(Rounding::Round);
    let r45 = rotation_2d(std::f64::consts::FRAC_PI_4);
    let d = [[2.0, 0.0], [0.0, 0.5]];
    let a = empirical_xi_2d(r45, 200.0, q).unwrap();
    // diag(2, ½) then R45, read left to right as a pipeline.
    let b = empirical_xi_2d(matmul_2d(r45, d), 200.0, q).unwrap();
    let c = empirical_xi_2d(d, 200.0, q).unwrap();
    Outcome {
        pass: (0.82..=0.86).contains(&a) && (0.58..=0.62).contains(&b) && (0.48..=0.52).contains(&c),
        detail: format!("R45 {a:.4}, diag(2,½)·R45 {b:.4}, diag(2,½) {c:.4} at r = 200"),
    }
}

fn heuristic_crop() -> Outcome {
    let p = RegimePolicy::default();
    let h = heuristic_capacity(small(), 40.0, &crop_rescale(small(), 0.25).unwrap(), &p).unwrap();
    let c = capacity_gray_center(small(), 40.0, &p).unwrap();
    Outcome {
        pass: (0.4..=0.6).contains(&h.capacity.bpp) && c.bpp > 3.0,
        detail: format!(
            "crop side 0.25: {:.4} bpp via {} (rank {}, log2 ξ {:.2}); PSNR-only {:.3} bpp",
            h.capacity.bpp, h.capacity.bound_id, h.rank, h.log2_xi, c.bpp
        ),
    }
}

fn conservative_table() -> Outcome {
    let f = small();
    let policy = RegimePolicy {
        precision: Precision::Auto { min_bits: 300, max_bits: 16_384 },
        terms: 50_000,
        ..RegimePolicy::default()
    };
    let rows: Vec<(&str, AffineOperator, f64, f64)> = vec![
        ("flip", flip_h(f).unwrap(), 2352.0, FLIP_TOLERANCE),
        ("crop 50%", crop_rescale(f, 0.5).unwrap(), 11.0, ROW_TOLERANCE),
        ("crop 75%", crop_rescale(f, 0.75).unwrap(), 3.0, ROW_TOLERANCE),
        ("linjpeg q10", linjpeg(f, 10).unwrap(), 104.0, ROW_TOLERANCE),
        ("linjpeg q15", linjpeg(f, 15).unwrap(), 105.0, ROW_TOLERANCE),
        ("rotation 30°", rotation(f, 30f64.to_radians()).unwrap(), 57.0, ROW_TOLERANCE),
        ("rotation 45°", rotation(f, 45f64.to_radians()).unwrap(), 64.0, ROW_TOLERANCE),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, op, paper, tol) in rows {
        let t = Instant::now();
        let r = conservative_capacity(f, 42.0, &op, &policy).unwrap();
        let rel = (r.capacity.bits - paper).abs() / paper;
        let ok = rel <= tol;
        pass &= ok;
        let precision = r.capacity.diagnostics.as_ref().map_or(0, |d| d.precision_bits);
        parts.push(format!(
            "\n    {name:<13} {:>9.3} bits vs {paper:>6} ({:+.1}%, {}) rank {} precision {precision} bits {:.0}s",
            r.capacity.bits,
            100.0 * (r.capacity.bits - paper) / paper,
            if ok { "ok" } else { "off" },
            r.rank,
            t.elapsed().as_secs_f64()
        ));
    }
    // The box bound on the preimage volume, checked on 2-D maps.
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut violations = 0;
    for i in 0..50 {
        let m = random_map(&mut rng, i);
        let r = rng.gen_range(0.5..6.0);
        let op = AffineOperator::from_dense(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]], vec![0.0; 2]).unwrap();
        let k = preimage_log2_volume(&op, r, &RegimePolicy::default()).unwrap().exp2();
        for _ in 0..4 {
            let b = [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)];
            let c = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            if preimage_area(m, b, c, r) > k * (1.0 + 1e-6) + 1e-9 {
                violations += 1;
            }
        }
    }
    parts.push(format!("\n    2-D preimage-volume oracle: {violations} violations over 50 maps × 4 cells"));
    Outcome { pass, detail: parts.concat() }
}

fn transform_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let dct = dct8().then(&idct8()).unwrap();
    let x: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..255.0)).collect();
    let dct_err = dct.act(&x).unwrap().iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let f = small();
    let col = rgb_to_ycbcr(f).unwrap().then(&ycbcr_to_rgb(f).unwrap()).unwrap();
    let y: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(0.0..255.0)).collect();
    let col_err = col.act(&y).unwrap().iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let flip = flip_h(f).unwrap();
    let flip_ok = flip.then(&flip).unwrap().triplets() == AffineOperator::identity(f.dim()).triplets();
    let lj = linjpeg(f, 15).unwrap();
    let rank = singular_spectrum(&lj).unwrap().rank;
    let g: Vec<f64> = (0..256).map(|_| rng.gen_range(0.0..255.0)).collect();
    let gray: Vec<f64> = g.iter().chain(&g).chain(&g).copied().collect();
    let gray_err = lj.act(&gray).unwrap().iter().zip(&gray).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Outcome {
        pass: dct_err < 1e-9 && col_err < 1e-10 && flip_ok && rank == 384 && gray_err < 1e-6,
        detail: format!(
            "idct∘dct {dct_err:.1e}; YCbCr {col_err:.1e}; flip involution {flip_ok}; LinJPEG q15 rank {rank}, gray {gray_err:.1e}"
        ),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<&'static str>);
    let criteria: [Criterion; 9] = [
        ("codec-capacity-ladder", codec_ladder, None),
        ("psnr-only-magnitude", psnr_magnitude, None),
        ("corner-penalty", corner_penalty, None),
        ("lattice-oracle-equivalence", lattice_equivalence, None),
        ("geometry-oracles", geometry_oracles, None),
        ("empirical-quantized-factors", empirical_factors, None),
        ("heuristic-robustness-magnitude", heuristic_crop, None),
        ("conservative-table", conservative_table, Some("LinJPEG and 75% crop rows differ from the published values")),
        ("transform-identities", transform_identities, None),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (name, run, known) in criteria {
        let t = Instant::now();
        let o = run();
        let secs = t.elapsed().as_secs_f64();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {name} ({secs:.1}s): {}", o.detail);
        if !o.pass {
            failed += 1;
            match known {
                Some(why) => println!("     known: {why}"),
                None => unexpected += 1,
            }
        } else if known.is_some() {
            println!("     note: expected this criterion to fail; it passed");
        }
    }
    println!("{} of {} criteria passed; {unexpected} unexpected failures", criteria.len() - failed, criteria.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
