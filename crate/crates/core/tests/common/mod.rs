//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Coefficients of `p·q` truncated to degree `deg`.
fn mul_trunc(p: &[BigUint], q: &[BigUint], deg: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); deg + 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += a * b;
        }
    }
    out
}

/// Number of integer points `z ∈ Z^dim` with `|z|² ≤ r2` whose coordinates
/// lie in `axis` (one-dimensional offsets), via the generating function
/// `(Σ_{k ∈ axis} x^{k²})^dim`.
pub fn theta_count(dim: usize, r2: u64, axis: impl Iterator<Item = i64>) -> BigUint {
    let deg = r2 as usize;
    let mut base = vec![BigUint::zero(); deg + 1];
    for k in axis {
        let s = (k * k) as usize;
        if s <= deg {
            base[s] += 1u32;
        }
    }
    let mut acc = vec![BigUint::zero(); deg + 1];
    acc[0] = BigUint::one();
    let mut e = dim;
    let mut pow = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_trunc(&acc, &pow, deg);
        }
        e >>= 1;
        if e > 0 {
            pow = mul_trunc(&pow, &pow, deg);
        }
    }
    acc.into_iter().fold(BigUint::zero(), |s, c| s + c)
}

/// Points of `Z^dim` in the closed ball of squared radius `r2`.
pub fn ball_count(dim: usize, r2: u64) -> BigUint {
    let m = (r2 as f64).sqrt() as i64 + 1;
    theta_count(dim, r2, -m..=m)
}

/// Points of `Z^dim_{≥0}` in the closed ball of squared radius `r2`.
pub fn orthant_count(dim: usize, r2: u64) -> BigUint {
    let m = (r2 as f64).sqrt() as i64 + 1;
    theta_count(dim, r2, 0..=m)
}

pub fn log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_string().parse::<f64>().unwrap().log2();
    }
    let shift = bits - 900;
    (x >> shift).to_string().parse::<f64>().unwrap().log2() + shift as f64
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Area of `[a0, b0] × [a1, b1] ∩ B(c, r)` by integrating chord lengths.
/// The integrand has kinks where the chord meets the box edges, so the
/// interval is split there first.
pub fn rect_disk_area(a: [f64; 2], b: [f64; 2], c: [f64; 2], r: f64, tol: f64) -> f64 {
    let lo = a[0].max(c[0] - r);
    let hi = b[0].min(c[0] + r);
    if hi <= lo {
        return 0.0;
    }
    let chord = |x: f64| {
        let h = (r * r - (x - c[0]).powi(2)).max(0.0).sqrt();
        ((c[1] + h).min(b[1]) - (c[1] - h).max(a[1])).max(0.0)
    };
    let mut cuts = vec![lo, hi];
    for y in [a[1], b[1]] {
        let d = r * r - (y - c[1]).powi(2);
        if d > 0.0 {
            cuts.extend([c[0] - d.sqrt(), c[0] + d.sqrt()]);
        }
    }
    cuts.retain(|&x| x >= lo && x <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| simpson(&chord, w[0], w[1], tol)).sum()
}

/// `⌊r²⌋` of the exact value of the double `r ≥ 0`, from its mantissa and
/// exponent.
pub fn exact_floor_square(r: f64) -> u64 {
    if r == 0.0 {
        return 0;
    }
    let bits = r.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mant, e) =
        if exp == 0 { (bits & ((1 << 52) - 1), -1074) } else { ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075) };
    let sq = BigUint::from(mant) * BigUint::from(mant);
    let shift = 2 * e;
    let v = if shift >= 0 { sq << shift as usize } else { sq >> (-shift) as usize };
    v.try_into().unwrap()
}

/// Area of `{x : Mx ∈ b + [0,1]²} ∩ B(c, r)`, integrating vertical chords.
pub fn preimage_area(m: [[f64; 2]; 2], b: [f64; 2], c: [f64; 2], r: f64) -> f64 {
    let chord = |x: f64| {
        let h = (r * r - (x - c[0]).powi(2)).max(0.0).sqrt();
        let (mut lo, mut hi) = (c[1] - h, c[1] + h);
        for i in 0..2 {
            let (a, s) = (m[i][0] * x, m[i][1]);
            if s.abs() < 1e-300 {
                if a < b[i] || a > b[i] + 1.0 {
                    return 0.0;
                }
            } else {
                let (y0, y1) = ((b[i] - a) / s, (b[i] + 1.0 - a) / s);
                lo = lo.max(y0.min(y1));
                hi = hi.min(y0.max(y1));
            }
        }
        (hi - lo).max(0.0)
    };
    let pieces = 400;
    let step = 2.0 * r / pieces as f64;
    (0..pieces).map(|k| simpson(&chord, c[0] - r + k as f64 * step, c[0] - r + (k + 1) as f64 * step, 1e-12)).sum()
}

/// Entries uniform in [−2, 2]; every fifth map has rank one and some are
/// diagonal.
pub fn random_map(rng: &mut rand_chacha::ChaCha8Rng, i: usize) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = rand::Rng::gen_range(rng, -2.0..2.0);
        }
    }
    if i.is_multiple_of(5) {
        let t = rand::Rng::gen_range(rng, -1.0..1.0);
        m[1] = [m[0][0] * t, m[0][1] * t];
    }
    if i % 10 == 3 {
        m = [[m[0][0], 0.0], [0.0, m[1][1]]];
    }
    m
}
