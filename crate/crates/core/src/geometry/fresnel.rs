//! Fresnel integrals `C(x) = ∫₀ˣ cos t² dt`, `S(x) = ∫₀ˣ sin t² dt`.
//!
//! Both are handled together as `F(x) = C(x) + i·S(x) = ∫₀ˣ e^{it²} dt`.
//! Large arguments go through the tail `I(x) = ∫ₓ^∞ e^{it²} dt`, using
//! `F(x) = √(π/8)(1 + i) − I(x)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use super::mp::{self, Complex, Float};

const SERIES_LIMIT: f64 = 3.0;

/// `F(x)` in double precision, for any real `x` (F is odd).
pub fn fresnel_f64(x: f64) -> Complex64 {
    if x < 0.0 {
        return -fresnel_f64(-x);
    }
    if x == 0.0 {
        return Complex64::zero();
    }
    if x <= SERIES_LIMIT {
        series_f64(x)
    } else {
        let limit = (std::f64::consts::PI / 8.0).sqrt();
        Complex64::new(limit, limit) - tail_f64(x)
    }
}

pub fn fresnel_c(x: f64) -> f64 {
    fresnel_f64(x).re
}

pub fn fresnel_s(x: f64) -> f64 {
    fresnel_f64(x).im
}

/// `Σ iᵐ x^{2m+1} / (m!(2m+1))`.
fn series_f64(x: f64) -> Complex64 {
    let x2 = x * x;
    let mut t = x;
    let mut sum = Complex64::new(x, 0.0);
    let mut m = 1u32;
    loop {
        t *= x2 / f64::from(m);
        let c = t / f64::from(2 * m + 1);
        match m % 4 {
            1 => sum.im += c,
            2 => sum.re -= c,
            3 => sum.im -= c,
            _ => sum.re += c,
        }
        if c < 1e-18 * sum.norm() && f64::from(m) > x2 {
            return sum;
        }
        m += 1;
    }
}

/// `I(x) = ½ e^{iπ/4} e^{ix²} K(z)` with `z = x e^{−iπ/4}` and `K` the
/// continued fraction of `√π e^{z²} erfc(z)`, evaluated by modified Lentz.
fn tail_f64(x: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let z = rot * x;
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z;
    let mut c = z;
    let mut d = Complex64::zero();
    for n in 2..2000u32 {
        let a = f64::from(n - 1) / 2.0;
        d = z + d * a;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = z + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let phase = Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_4 + (x * x) % (2.0 * std::f64::consts::PI));
    phase / f
}

/// `F(x)` with absolute error below about `2^−abs_bits`.
///
/// `x` must carry at least `abs_bits + log2 |x|` significant bits for the
/// result to be meaningful.
pub fn fresnel_mp(x: &Float, abs_bits: u64) -> Complex {
    if x.is_negative() {
        let f = fresnel_mp(&x.neg(), abs_bits);
        return Complex::zero().sub(&f, abs_bits + 8);
    }
    if x.is_zero() {
        return Complex::zero();
    }
    let xf = x.to_f64();
    // The asymptotic tail's smallest term is about e^{−x²}; use it only once
    // that is already below the target.
    if xf * xf > (abs_bits as f64 + 12.0) * std::f64::consts::LN_2 + 4.0 {
        asymptotic_mp(x, abs_bits)
    } else {
        series_mp(x, abs_bits)
    }
}

fn series_mp(x: &Float, abs_bits: u64) -> Complex {
    let x2f = x.to_f64().powi(2);
    let growth = (x2f * std::f64::consts::LOG2_E).ceil() as u64;
    let w = abs_bits + growth + 32;
    let xw = x.to_fixed(w);
    let x2 = (&xw * &xw) >> w;
    let mut t = xw.clone();
    let mut re = xw;
    let mut im = BigInt::zero();
    let stop_bits = 8u64.max(w.saturating_sub(abs_bits + 8));
    let mut m: u64 = 1;
    loop {
        t = ((&t * &x2) >> w) / m;
        let c = &t / (2 * m + 1);
        match m % 4 {
            1 => im += &c,
            2 => re -= &c,
            3 => im -= &c,
            _ => re += &c,
        }
        if (m as f64) > x2f && t.bits() < stop_bits {
            break;
        }
        m += 1;
    }
    Complex::from_fixed(re, im, w).round(abs_bits + 16)
}

fn asymptotic_mp(x: &Float, abs_bits: u64) -> Complex {
    let xf = x.to_f64();
    let prec = abs_bits + 16 + xf.log2().max(0.0) as u64;
    let w = prec + 16;
    // y = 1/(2x²)
    let x2 = x.mul(x, prec + 2 * (xf.log2().max(0.0) as u64) + 8);
    let y = Float::from_int(1).div(&x2.mul_pow2(1), w).to_fixed(w);
    let one = BigInt::from(1) << w;
    let mut mag = one.clone();
    let mut re = one;
    let mut im = BigInt::zero();
    let mut m: u64 = 1;
    loop {
        let next = ((&mag * &y) >> w) * (2 * m - 1);
        if next >= mag || next.is_zero() {
            break;
        }
        mag = next;
        // Successive terms carry the phase (−i)^m.
        match m % 4 {
            1 => im -= &mag,
            2 => re -= &mag,
            3 => im += &mag,
            _ => re += &mag,
        }
        m += 1;
    }
    let series = Complex::from_fixed(re, im, w);
    let phase = mp::exp_i(&mp::reduce_angle(&x2, prec), prec);
    let tail = series.mul(&phase, prec).mul_i();
    let inv = Float::from_int(1).div(&x.mul_pow2(1), prec);
    let tail = tail.scale(&inv, prec);
    let limit = mp::pi(prec).div_u64(8, prec).sqrt(prec);
    Complex::from_parts(&limit, &limit).sub(&tail, prec)
}
