//! Minimal binary floating point on top of `num-bigint`.
//!
//! Only what the Fresnel series and the box–ball engine need: products,
//! sums, division, square roots, `π` and `e^{iθ}`. Precision is an explicit
//! argument to every rounding operation; results are truncated, so each
//! operation contributes at most one unit in the last kept bit.

use std::sync::Mutex;

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive, Zero};

/// `m · 2^e`.
#[derive(Clone, Debug, PartialEq)]
pub struct Float {
    m: BigInt,
    e: i64,
}

fn shr_trunc(m: &BigInt, sh: u64) -> BigInt {
    if m.sign() == Sign::Minus {
        -((-m) >> sh)
    } else {
        m >> sh
    }
}

fn shift(m: &BigInt, by: i64) -> BigInt {
    if by >= 0 {
        m << by as u64
    } else {
        shr_trunc(m, (-by) as u64)
    }
}

/// `log2 |m|` from the leading 64 bits.
fn log2_mag(m: &BigInt) -> f64 {
    let b = m.bits();
    if b == 0 {
        return f64::NEG_INFINITY;
    }
    let sh = b.saturating_sub(64);
    let top = (m.magnitude() >> sh).to_u64().unwrap() as f64;
    top.log2() + sh as f64
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl Float {
    pub fn zero() -> Self {
        Self { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Self { m: BigInt::from(v), e: 0 }
    }

    /// Exact conversion.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot convert {x} to Float");
        if x == 0.0 {
            return Self::zero();
        }
        let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
        let m = BigInt::from(mant);
        Self { m: if sign < 0 { -m } else { m }, e: i64::from(exp) }
    }

    /// The value `m · 2^(−frac_bits)`.
    pub fn from_fixed(m: BigInt, frac_bits: u64) -> Self {
        Self { m, e: -(frac_bits as i64) }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }

    pub fn neg(&self) -> Self {
        Self { m: -&self.m, e: self.e }
    }

    pub fn round(mut self, prec: u64) -> Self {
        let b = self.m.bits();
        if b > prec {
            let sh = b - prec;
            self.m = shr_trunc(&self.m, sh);
            self.e += sh as i64;
        }
        self
    }

    /// Exponent of the leading bit plus one (`|x| < 2^top`).
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }

    pub fn mul(&self, o: &Float, prec: u64) -> Float {
        Float { m: &self.m * &o.m, e: self.e + o.e }.round(prec)
    }

    pub fn add(&self, o: &Float, prec: u64) -> Float {
        if self.is_zero() {
            return o.clone().round(prec);
        }
        if o.is_zero() {
            return self.clone().round(prec);
        }
        let (ta, tb) = (self.top(), o.top());
        if ta - tb > prec as i64 + 4 {
            return self.clone().round(prec);
        }
        if tb - ta > prec as i64 + 4 {
            return o.clone().round(prec);
        }
        let a = self.clone().round(prec + 8);
        let b = o.clone().round(prec + 8);
        let e = a.e.min(b.e);
        let m = shift(&a.m, a.e - e) + shift(&b.m, b.e - e);
        Float { m, e }.round(prec)
    }

    pub fn sub(&self, o: &Float, prec: u64) -> Float {
        self.add(&o.neg(), prec)
    }

    pub fn div(&self, o: &Float, prec: u64) -> Float {
        assert!(!o.is_zero(), "division by zero");
        let sh = (prec as i64 + o.m.bits() as i64 - self.m.bits() as i64 + 2).max(0);
        let m = (&self.m << sh as u64) / &o.m;
        Float { m, e: self.e - sh - o.e }.round(prec)
    }

    pub fn div_u64(&self, d: u64, prec: u64) -> Float {
        self.div(&Float { m: BigInt::from(d), e: 0 }, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Float {
        Float { m: self.m.clone(), e: self.e + k }
    }

    pub fn sqrt(&self, prec: u64) -> Float {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let mut s = (2 * prec as i64 + 2 - self.m.bits() as i64).max(0);
        if (self.e - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = (&self.m << s as u64).sqrt();
        Float { m, e: (self.e - s) / 2 }.round(prec)
    }

    /// `round_toward_zero(value · 2^frac_bits)`.
    pub fn to_fixed(&self, frac_bits: u64) -> BigInt {
        shift(&self.m, self.e + frac_bits as i64)
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.m.bits();
        if b == 0 {
            return 0.0;
        }
        let sh = b.saturating_sub(62);
        let top = shr_trunc(&self.m, sh).to_i64().unwrap() as f64;
        ldexp(top, self.e + sh as i64)
    }

    pub fn log2_abs(&self) -> f64 {
        log2_mag(&self.m) + self.e as f64
    }
}

/// `(re + i·im) · 2^e`; both parts share one exponent, so precision is
/// relative to the modulus rather than to each component.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    re: BigInt,
    im: BigInt,
    e: i64,
}

impl Complex {
    pub fn zero() -> Self {
        Self { re: BigInt::zero(), im: BigInt::zero(), e: 0 }
    }

    pub fn one() -> Self {
        Self { re: BigInt::one(), im: BigInt::zero(), e: 0 }
    }

    pub fn from_fixed(re: BigInt, im: BigInt, frac_bits: u64) -> Self {
        Self { re, im, e: -(frac_bits as i64) }
    }

    pub fn from_parts(re: &Float, im: &Float) -> Self {
        if re.is_zero() {
            return Self { re: BigInt::zero(), im: im.m.clone(), e: im.e };
        }
        if im.is_zero() {
            return Self { re: re.m.clone(), im: BigInt::zero(), e: re.e };
        }
        let e = re.e.min(im.e);
        Self { re: shift(&re.m, re.e - e), im: shift(&im.m, im.e - e), e }
    }

    fn bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn round(mut self, prec: u64) -> Self {
        let b = self.bits();
        if b > prec {
            let sh = b - prec;
            self.re = shr_trunc(&self.re, sh);
            self.im = shr_trunc(&self.im, sh);
            self.e += sh as i64;
        }
        self
    }

    fn top(&self) -> i64 {
        self.e + self.bits() as i64
    }

    #[cfg(test)]
    pub fn re(&self) -> Float {
        Float { m: self.re.clone(), e: self.e }
    }

    pub fn im(&self) -> Float {
        Float { m: self.im.clone(), e: self.e }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im, e: self.e }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self { re: -&self.im, im: self.re.clone(), e: self.e }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self { re: self.re.clone(), im: self.im.clone(), e: self.e + k }
    }

    pub fn mul(&self, o: &Complex, prec: u64) -> Complex {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Complex { re, im, e: self.e + o.e }.round(prec)
    }

    pub fn square(&self, prec: u64) -> Complex {
        let re = (&self.re + &self.im) * (&self.re - &self.im);
        let im = (&self.re * &self.im) << 1u32;
        Complex { re, im, e: 2 * self.e }.round(prec)
    }

    pub fn scale(&self, f: &Float, prec: u64) -> Complex {
        Complex { re: &self.re * &f.m, im: &self.im * &f.m, e: self.e + f.e }.round(prec)
    }

    pub fn add(&self, o: &Complex, prec: u64) -> Complex {
        if self.is_zero() {
            return o.clone().round(prec);
        }
        if o.is_zero() {
            return self.clone().round(prec);
        }
        let (ta, tb) = (self.top(), o.top());
        if ta - tb > prec as i64 + 4 {
            return self.clone().round(prec);
        }
        if tb - ta > prec as i64 + 4 {
            return o.clone().round(prec);
        }
        let a = self.clone().round(prec + 8);
        let b = o.clone().round(prec + 8);
        let e = a.e.min(b.e);
        let (sa, sb) = (a.e - e, b.e - e);
        Complex { re: shift(&a.re, sa) + shift(&b.re, sb), im: shift(&a.im, sa) + shift(&b.im, sb), e }.round(prec)
    }

    pub fn sub(&self, o: &Complex, prec: u64) -> Complex {
        self.add(&Complex { re: -&o.re, im: -&o.im, e: o.e }, prec)
    }

    pub fn pow(&self, mut n: u64, prec: u64) -> Complex {
        let mut base = self.clone().round(prec);
        let mut acc = Complex::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.square(prec);
            }
        }
        acc
    }

    #[cfg(test)]
    pub fn log2_abs(&self) -> f64 {
        let b = self.bits();
        if b == 0 {
            return f64::NEG_INFINITY;
        }
        let sh = b.saturating_sub(60);
        let re = shr_trunc(&self.re, sh).to_i64().unwrap() as f64;
        let im = shr_trunc(&self.im, sh).to_i64().unwrap() as f64;
        re.hypot(im).log2() + (self.e + sh as i64) as f64
    }

    #[cfg(test)]
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re().to_f64(), self.im().to_f64())
    }
}

/// `atan(1/n) · 2^bits`.
fn atan_inv(n: u64, bits: u64) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << bits) / n;
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power /= &n2;
        let term = &power / (2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

static PI_CACHE: Mutex<Option<(u64, BigInt)>> = Mutex::new(None);

/// `⌊π · 2^bits⌋` up to a few units in the last place (Machin's formula).
pub fn pi_fixed(bits: u64) -> BigInt {
    let mut cache = PI_CACHE.lock().unwrap_or_else(|p| p.into_inner());
    if let Some((have, value)) = cache.as_ref() {
        if *have >= bits {
            return value >> (have - bits);
        }
    }
    let work = bits.max(256) + 32;
    let pi = (atan_inv(5, work) << 4u32) - (atan_inv(239, work) << 2u32);
    let out = &pi >> (work - bits);
    *cache = Some((work, pi));
    out
}

pub fn pi(prec: u64) -> Float {
    Float::from_fixed(pi_fixed(prec + 2), prec + 2)
}

/// Reduces `theta` into `(−π, π]` with absolute error about `2^−prec`.
pub fn reduce_angle(theta: &Float, prec: u64) -> Float {
    let extra = theta.top().max(0) as u64;
    let w = prec + extra + 16;
    let x = theta.to_fixed(w);
    let two_pi = pi_fixed(w) << 1u32;
    let half = &two_pi >> 1u32;
    let mut r = num_integer::Integer::mod_floor(&x, &two_pi);
    if r > half {
        r -= &two_pi;
    }
    Float::from_fixed(r, w)
}

/// `e^{iθ}` for `|θ| ≲ 4`, absolute error about `2^−prec`.
pub fn exp_i(theta: &Float, prec: u64) -> Complex {
    let halvings = ((prec as f64).sqrt() / 2.0).ceil() as u64;
    let w = prec + 2 * halvings + 24;
    let z = theta.to_fixed(w) >> halvings;
    let one = BigInt::one() << w;
    let mut re = one.clone();
    let mut im = BigInt::zero();
    let mut t = one;
    let mut m: u64 = 1;
    loop {
        t = shr_trunc(&(&t * &z), w) / m;
        if t.is_zero() {
            break;
        }
        match m % 4 {
            1 => im += &t,
            2 => re -= &t,
            3 => im -= &t,
            _ => re += &t,
        }
        m += 1;
    }
    for _ in 0..halvings {
        let nre = shr_trunc(&((&re + &im) * (&re - &im)), w);
        let nim = shr_trunc(&(&re * &im), w - 1);
        re = nre;
        im = nim;
    }
    Complex::from_fixed(re, im, w).round(prec + 8)
}
