//! Volume of the intersection of an axis-aligned box with a ball.
//!
//! After rescaling to the unit ball and trimming every interval to
//! `[−1, 1]`, let `ℓ = Σ max(α_j², β_j²)` and `K = ∏(β_j − α_j)`. For
//! `ℓ ≤ 1` the box lies inside the ball and the volume is `K`. Otherwise
//!
//! ```text
//! vol / K = ½ − Σ(α²+αβ+β²)/(3ℓ) + 1/ℓ + (1/π) Im Σ_k Φ(−2πk/ℓ) e^{2πik/ℓ} / k
//! Φ(ω)    = ∏_j [ΔC_j + i·sgn(ω)·ΔS_j] / ((β_j − α_j)√|ω|)
//! ```
//!
//! with `ΔC_j = C(β_j√|ω|) − C(α_j√|ω|)` and likewise for `S`. The bracket
//! is the probability that a uniform point of the box lands in the ball, so
//! for high-dimensional boxes it is astronomically small while every term of
//! the series is of order one. The evaluation therefore runs in exact
//! fixed-point arithmetic at a precision planned from a saddle-point estimate
//! of the answer. Each term is computed only to the precision its magnitude
//! warrants, and terms below the working resolution are skipped.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use super::fresnel::{fresnel_f64, fresnel_mp};
use super::mp::{self, Complex, Float};
use super::saddle;
use crate::error::{invalid, Error, Result};

/// Bits of the answer that must clear the noise floor before a result is
/// accepted.
const RESOLVED_BITS: f64 = 40.0;

/// `sup |F|` for the Fresnel integral `F = C + iS` (1.18947), rounded up.
const FRESNEL_SUP: f64 = 1.1895;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Work at exactly this many bits below the binary point.
    Fixed(u64),
    /// Plan the precision from an estimate of the answer, retrying with more
    /// bits if the result does not clear the noise floor.
    Auto { min_bits: u64, max_bits: u64 },
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Auto { min_bits: 200, max_bits: 16_384 }
    }
}

pub const DEFAULT_TERMS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBallSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
    pub terms: usize,
    pub precision: Precision,
}

impl BoxBallSpec {
    /// Box `∏[lo_j, hi_j]` against the ball of `radius` about the origin.
    pub fn new(axes: &[(f64, f64)], radius: f64) -> Self {
        Self {
            lower: axes.iter().map(|a| a.0).collect(),
            upper: axes.iter().map(|a| a.1).collect(),
            center: vec![0.0; axes.len()],
            radius,
            terms: DEFAULT_TERMS,
            precision: Precision::default(),
        }
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64, radius: f64) -> Self {
        Self::new(&vec![(lo, hi); dim], radius)
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        self.center = center;
        self
    }

    pub fn with_terms(mut self, terms: usize) -> Self {
        self.terms = terms;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || self.upper.len() != n || self.center.len() != n {
            return invalid("box, center and dimension must agree and be nonempty");
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return invalid(format!("ball radius must be positive, got {}", self.radius));
        }
        for j in 0..n {
            let (lo, hi, c) = (self.lower[j], self.upper[j], self.center[j]);
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() || !c.is_finite() {
                return invalid(format!("invalid interval [{lo}, {hi}] on axis {j}"));
            }
        }
        if self.terms == 0 {
            return invalid("series needs at least one term");
        }
        let bits = match self.precision {
            Precision::Fixed(b) => b,
            Precision::Auto { min_bits, max_bits } => {
                if max_bits < min_bits {
                    return invalid("precision range is empty");
                }
                min_bits
            }
        };
        if bits < 64 {
            return invalid(format!("precision must be at least 64 bits, got {bits}"));
        }
        Ok(())
    }
}

/// How the series evaluation went.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDiagnostics {
    /// Absolute precision of the normalized volume, in bits.
    pub precision_bits: u64,
    pub terms_limit: usize,
    /// Index of the last term examined.
    pub last_index: usize,
    /// Terms computed in multiprecision (the rest were below resolution).
    pub terms_evaluated: usize,
    /// `log2 |Φ_k / k|` of the last computed term.
    pub last_term_log2: f64,
    /// Bound on `log2` of the neglected tail of the normalized volume.
    pub tail_bound_log2: f64,
    /// `log2` of the volume divided by the trimmed box volume.
    pub normalized_log2: f64,
    /// Precision escalations needed under [`Precision::Auto`].
    pub retries: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogVolume {
    pub log2_volume: f64,
    /// Present when the series branch ran.
    pub diagnostics: Option<SeriesDiagnostics>,
}

impl LogVolume {
    fn closed(log2_volume: f64) -> Self {
        Self { log2_volume, diagnostics: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Group {
    pub a: f64,
    pub b: f64,
    pub count: u64,
}

/// Rescaled, trimmed and grouped axes; `None` when the box misses the ball.
fn unit_groups(spec: &BoxBallSpec) -> Option<Vec<Group>> {
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for j in 0..spec.dim() {
        let a = ((spec.lower[j] - spec.center[j]) / spec.radius).max(-1.0) + 0.0;
        let b = ((spec.upper[j] - spec.center[j]) / spec.radius).min(1.0) + 0.0;
        if !(b > a) {
            return None;
        }
        *counts.entry((a.to_bits(), b.to_bits())).or_default() += 1;
    }
    let mut groups: Vec<Group> =
        counts.into_iter().map(|((a, b), count)| Group { a: f64::from_bits(a), b: f64::from_bits(b), count }).collect();
    groups.sort_by(|x, y| (x.a, x.b).partial_cmp(&(y.a, y.b)).unwrap());
    Some(groups)
}

/// `log2` of the volume of `∏[α_j, β_j] ∩ B(x, r)`.
pub fn box_ball_intersection_log2vol(spec: &BoxBallSpec) -> Result<LogVolume> {
    spec.validate()?;
    let Some(groups) = unit_groups(spec) else {
        return Ok(LogVolume::closed(f64::NEG_INFINITY));
    };
    let scale = spec.dim() as f64 * spec.radius.log2();
    let log2_box: f64 = groups.iter().map(|g| g.count as f64 * (g.b - g.a).log2()).sum();
    let ell: f64 = groups.iter().map(|g| g.count as f64 * g.a.abs().max(g.b.abs()).powi(2)).sum();
    if ell <= 1.0 {
        return Ok(LogVolume::closed(log2_box + scale));
    }
    let diag = normalized_volume(&groups, spec.terms, spec.precision)?;
    Ok(LogVolume { log2_volume: diag.normalized_log2 + log2_box + scale, diagnostics: Some(diag) })
}

/// Saddle-point approximation of [`box_ball_intersection_log2vol`]; cheap,
/// accurate to a few bits in high dimension.
pub fn box_ball_log2vol_estimate(spec: &BoxBallSpec) -> Result<f64> {
    spec.validate()?;
    let Some(groups) = unit_groups(spec) else {
        return Ok(f64::NEG_INFINITY);
    };
    let scale = spec.dim() as f64 * spec.radius.log2();
    let log2_box: f64 = groups.iter().map(|g| g.count as f64 * (g.b - g.a).log2()).sum();
    let ell: f64 = groups.iter().map(|g| g.count as f64 * g.a.abs().max(g.b.abs()).powi(2)).sum();
    if ell <= 1.0 {
        return Ok(log2_box + scale);
    }
    let triples: Vec<_> = groups.iter().map(|g| (g.a, g.b, g.count)).collect();
    Ok(saddle::log2_fraction_estimate(&triples) + log2_box + scale)
}

fn normalized_volume(groups: &[Group], terms: usize, precision: Precision) -> Result<SeriesDiagnostics> {
    let triples: Vec<_> = groups.iter().map(|g| (g.a, g.b, g.count)).collect();
    let estimate = saddle::log2_fraction_estimate(&triples);
    let (mut bits, max_bits) = match precision {
        Precision::Fixed(b) => (b, b),
        Precision::Auto { min_bits, max_bits } => {
            let planned = (-estimate).max(0.0).ceil() as u64 + 64;
            (planned.clamp(min_bits, max_bits), max_bits)
        }
    };
    let mut retries = 0;
    loop {
        let mut diag = evaluate(groups, terms, bits);
        diag.retries = retries;
        let resolved = diag.normalized_log2 + bits as f64;
        if resolved >= RESOLVED_BITS {
            return Ok(diag);
        }
        if bits >= max_bits {
            return Err(Error::Numeric(format!(
                "box-ball series unresolved at {bits} bits (normalized volume ≈ 2^{:.1}, estimate 2^{:.1})",
                diag.normalized_log2, estimate
            )));
        }
        let deficit = if resolved.is_finite() { RESOLVED_BITS - resolved } else { bits as f64 };
        bits = (bits + deficit.ceil() as u64 + 64).min(max_bits);
        retries += 1;
    }
}

/// Upper bound on `|F(x)|`, using `|∫ₓ^∞ e^{it²} dt| ≤ 1/x`.
fn fresnel_bound(x: f64) -> f64 {
    let x = x.abs();
    FRESNEL_SUP.min(0.5 * std::f64::consts::PI.sqrt() + 1.0 / x)
}

/// Upper bound on `|F(b t) − F(a t)|`, nonincreasing in `t` once it drops
/// below the trivial `(b − a) t`.
fn diff_bound(g: &Group, t: f64) -> f64 {
    let (a, b) = if g.b <= 0.0 { (-g.b, -g.a) } else { (g.a, g.b) };
    let bound = if a > 0.0 {
        // Same sign: both values sit in the tail of the same branch.
        (1.0 / (a * t) + 1.0 / (b * t)).min(fresnel_bound(a * t) + fresnel_bound(b * t))
    } else if a == 0.0 {
        fresnel_bound(b * t)
    } else {
        fresnel_bound(a * t) + fresnel_bound(b * t)
    };
    bound.min((b - a) * t)
}

/// `F(b t) − F(a t)` in double precision.
fn diff_f64(g: &Group, t: f64) -> Complex64 {
    if g.a == -g.b {
        fresnel_f64(g.b * t) * 2.0
    } else {
        fresnel_f64(g.b * t) - fresnel_f64(g.a * t)
    }
}

fn evaluate(groups: &[Group], terms: usize, bits: u64) -> SeriesDiagnostics {
    let dim: u64 = groups.iter().map(|g| g.count).sum();
    let log_terms = (terms as f64).log2().ceil();
    let acc_bits = bits + log_terms as u64 + 16;
    let full = acc_bits + 160;
    let threshold = -(bits as f64 + log_terms + 8.0);
    let guard = 24.0 + (dim as f64).log2();

    let mut ell = Float::zero();
    let mut ex = Float::zero();
    for g in groups {
        let (a, b) = (Float::from_f64(g.a), Float::from_f64(g.b));
        let m = if g.a.abs() > g.b.abs() { &a } else { &b };
        let c = Float::from_int(g.count as i64);
        ell = ell.add(&m.mul(m, full).mul(&c, full), full);
        let quad = a.mul(&a, full).add(&a.mul(&b, full), full).add(&b.mul(&b, full), full);
        ex = ex.add(&quad.mul(&c, full), full);
    }
    let ex = ex.div_u64(3, full);
    let ell_f = ell.to_f64();
    let pi = mp::pi(full);
    let two_pi = pi.mul_pow2(1);
    let theta = two_pi.div(&ell, full);
    let step = mp::exp_i(&mp::reduce_angle(&theta, full), full);
    let root = theta.sqrt(full);

    let mut phasor = Complex::one();
    let mut acc = BigInt::zero();
    let mut evaluated = 0;
    let mut last_index = 0;
    let mut last_term_log2 = f64::NEG_INFINITY;
    let mut tail_bound_log2 = f64::NEG_INFINITY;
    let mut diff_log = vec![0.0; groups.len()];

    for k in 1..=terms {
        last_index = k;
        phasor = phasor.mul(&step, full);
        let t = (2.0 * std::f64::consts::PI * k as f64 / ell_f).sqrt();
        let lk = (k as f64).log2();
        let mut log_mag = -lk;
        let mut envelope = -lk;
        let mut decaying = 0u64;
        for (g, dl) in groups.iter().zip(diff_log.iter_mut()) {
            let width = (g.b - g.a) * t;
            let d = diff_f64(g, t).norm().max(1e-13);
            *dl = d.log2();
            log_mag += g.count as f64 * (*dl - width.log2());
            let cap = (diff_bound(g, t) / width).log2();
            if cap < 0.0 {
                envelope += g.count as f64 * cap;
                decaying += g.count;
            }
        }
        // Every factor's envelope decreases in k, so once it is below the
        // threshold no later term can matter.
        let tail = if decaying > 0 {
            envelope + lk - (decaying as f64 / 2.0).log2() - std::f64::consts::PI.log2()
        } else {
            f64::INFINITY
        };
        tail_bound_log2 = tail;
        if envelope < threshold {
            break;
        }
        if log_mag < threshold {
            continue;
        }
        let pk = (bits as f64 + log_terms + log_mag + guard).ceil().max(64.0) as u64;
        let phi = phi_mp(groups, k as u64, &root, pk, &diff_log, t);
        let z = phi.mul(&phasor.clone().round(pk + 8), pk);
        let term = z.im().div_u64(k as u64, pk);
        acc += term.to_fixed(acc_bits);
        evaluated += 1;
        last_term_log2 = log_mag;
    }

    let sum = Float::from_fixed(acc, acc_bits).div(&pi, full);
    let inv_ell = Float::from_int(1).div(&ell, full);
    let v = Float::from_f64(0.5).sub(&ex.mul(&inv_ell, full), full).add(&inv_ell, full).add(&sum, full);
    let normalized_log2 =
        if v.is_negative() || v.is_zero() || v.log2_abs() < -(bits as f64) { f64::NEG_INFINITY } else { v.log2_abs() };
    SeriesDiagnostics {
        precision_bits: bits,
        terms_limit: terms,
        last_index,
        terms_evaluated: evaluated,
        last_term_log2,
        tail_bound_log2,
        normalized_log2,
        retries: 0,
    }
}

/// `Φ(−2πk/ℓ)` with relative precision about `2^−pk`.
fn phi_mp(groups: &[Group], k: u64, root: &Float, pk: u64, diff_log: &[f64], t: f64) -> Complex {
    let pow_guard = 64 - groups.iter().map(|g| g.count).max().unwrap_or(1).leading_zeros() as u64;
    let work = pk + pow_guard + 8;
    let sqrt_k = Float::from_int(k as i64).sqrt(work + 64);
    let mut phi = Complex::one();
    for (g, &dl) in groups.iter().zip(diff_log) {
        let abs_bits = work + (-dl).max(0.0).ceil() as u64 + 8;
        let reach = (g.a.abs().max(g.b.abs()) * t).max(1.0).log2().ceil() as u64;
        let xprec = abs_bits + 2 * reach + 16;
        let tk = root.mul(&sqrt_k, xprec);
        let fb = fresnel_mp(&Float::from_f64(g.b).mul(&tk, xprec), abs_bits);
        let diff = if g.a == -g.b {
            fb.mul_pow2(1)
        } else if g.a == 0.0 {
            fb
        } else {
            let fa = fresnel_mp(&Float::from_f64(g.a).mul(&tk, xprec), abs_bits);
            fb.sub(&fa, abs_bits + 8)
        };
        let width = Float::from_f64(g.b - g.a).mul(&tk, work + 8);
        let inv = Float::from_int(1).div(&width, work + 8);
        let factor = diff.conj().scale(&inv, work + 8);
        phi = phi.mul(&factor.pow(g.count, work), work);
    }
    phi
}
