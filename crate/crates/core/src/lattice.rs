//! Counting integer points inside hyperspheres.
//!
//! Three counters share one contract: the number of `p ∈ Zⁿ` with
//! `‖p‖² ≤ r²`, optionally restricted to an axis-aligned box.
//!
//! Every partial sum subtracted from `r²` is an integer, so a point set is
//! determined by `⌊r²⌋` alone. The counters reduce the radius to that exact
//! integer once and then work in integer arithmetic throughout.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

/// Default limit on brute-force loop iterations.
pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub count: BigUint,
    pub log2_count: f64,
}

impl CountResult {
    fn new(count: BigUint) -> Self {
        let log2_count = log2_big(&count);
        Self { count, log2_count }
    }
}

/// `log2(x)` for an arbitrary-size integer; `−∞` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// Exact `⌊r²⌋` of a finite nonnegative `f64`.
pub fn floor_square(radius: f64) -> Result<u64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return invalid(format!("radius must be finite and >= 0, got {radius}"));
    }
    if radius == 0.0 {
        return Ok(0);
    }
    let (mantissa, exponent, _) = num_traits::float::FloatCore::integer_decode(radius);
    let sq = BigUint::from(mantissa) * BigUint::from(mantissa);
    let e = 2 * i64::from(exponent);
    let floored = if e >= 0 { sq << e as u64 } else { sq >> (-e) as u64 };
    floored.to_u64().ok_or_else(|| Error::InvalidArgument(format!("radius {radius} too large to count")))
}

/// Enumerates `{−⌊r⌋..⌊r⌋}^dim` and tests every point.
pub fn brute_force_count(dim: usize, radius: f64, budget: u64) -> Result<CountResult> {
    if dim == 0 || dim > 10 {
        return invalid(format!("brute force supports 1..=10 dimensions, got {dim}"));
    }
    let rsq = floor_square(radius)?;
    let side = radius.floor() as u64;
    let width = 2 * side + 1;
    let work = (width as f64).powi(dim as i32);
    if work > budget as f64 {
        return Err(Error::ResourceLimit(format!(
            "brute force over {width}^{dim} ≈ {work:.3e} points exceeds budget {budget}"
        )));
    }
    let lo = -(side as i64);
    let mut point = vec![lo; dim];
    let sq = (lo * lo) as u64;
    let mut total = sq * dim as u64;
    let mut count: u64 = 0;
    loop {
        if total <= rsq {
            count += 1;
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return Ok(CountResult::new(BigUint::from(count)));
            }
            let old = point[axis];
            total -= (old * old) as u64;
            if old < side as i64 {
                point[axis] = old + 1;
                total += ((old + 1) * (old + 1)) as u64;
                break;
            }
            point[axis] = lo;
            total += sq;
            axis += 1;
        }
    }
}

/// Upper limit on the largest coordinate magnitude, `J` in Mitchell's
/// recursion; the top call is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Cap {
    Below(u64),
    Unbounded,
}

struct Mitchell {
    memo: HashMap<(usize, u64, Cap), BigUint>,
    binomials: HashMap<usize, Vec<BigUint>>,
}

impl Mitchell {
    fn binomial_row(&mut self, m: usize) -> &[BigUint] {
        self.binomials.entry(m).or_insert_with(|| {
            let mut row = Vec::with_capacity(m + 1);
            let mut c = BigUint::one();
            row.push(c.clone());
            for i in 1..=m {
                c = c * BigUint::from(m - i + 1) / BigUint::from(i);
                row.push(c.clone());
            }
            row
        })
    }

    /// Points in `m` dimensions with `‖p‖² ≤ z` and every `|p_i| < cap`.
    fn s(&mut self, m: usize, z: u64, cap: Cap) -> BigUint {
        if m == 0 {
            return BigUint::one();
        }
        if let Some(hit) = self.memo.get(&(m, z, cap)) {
            return hit.clone();
        }
        let n = (z / m as u64).sqrt();
        let mut total = BigUint::from(2 * n + 1).pow(m as u32);
        for i in 1..m {
            let mut top = (z / i as u64).sqrt();
            if let Cap::Below(j) = cap {
                top = top.min(j - 1);
            }
            if top < n + 1 {
                // `top` only shrinks as `i` grows.
                break;
            }
            let mut inner = BigUint::zero();
            for jm in n + 1..=top {
                inner += self.s(m - i, z - i as u64 * jm * jm, Cap::Below(jm));
            }
            if !inner.is_zero() {
                let coeff = &self.binomial_row(m)[i] << i;
                total += coeff * inner;
            }
        }
        self.memo.insert((m, z, cap), total.clone());
        total
    }
}

/// Mitchell's symmetric recursion, memoized on exact integer keys.
pub fn mitchell_count(dim: usize, radius: f64) -> Result<CountResult> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    let rsq = floor_square(radius)?;
    let mut state = Mitchell { memo: HashMap::new(), binomials: HashMap::new() };
    Ok(CountResult::new(state.s(dim, rsq, Cap::Unbounded)))
}

/// Integer points inside both the ball and the closed box `∏[lo_i, hi_i]`.
pub fn bounded_count(radius: f64, bounds: &[(f64, f64)]) -> Result<CountResult> {
    if bounds.is_empty() {
        return invalid("dimension must be positive");
    }
    let mut int_bounds = Vec::with_capacity(bounds.len());
    for &(lo, hi) in bounds {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return invalid(format!("invalid axis bounds ({lo}, {hi})"));
        }
        int_bounds.push((lo.ceil() as i64, hi.floor() as i64));
    }
    let rsq = floor_square(radius)?;
    // Axes `d..` with identical bounds share cache entries through `tail_id`.
    let mut tail_id = vec![0usize; int_bounds.len()];
    for d in (0..int_bounds.len()).rev() {
        tail_id[d] = if d + 1 < int_bounds.len() && int_bounds[d] == int_bounds[d + 1] { tail_id[d + 1] } else { d };
    }
    let mut memo = HashMap::new();
    Ok(CountResult::new(bounded_rec(rsq, 0, &int_bounds, &tail_id, &mut memo)))
}

fn bounded_rec(
    rsq: u64,
    depth: usize,
    bounds: &[(i64, i64)],
    tail_id: &[usize],
    memo: &mut HashMap<(usize, usize, u64), BigUint>,
) -> BigUint {
    if depth == bounds.len() {
        return BigUint::one();
    }
    let remaining = bounds.len() - depth;
    let key = (tail_id[depth], remaining, rsq);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let m = rsq.sqrt() as i64;
    let lb = (-m).max(bounds[depth].0);
    let ub = m.min(bounds[depth].1);
    let mut count = BigUint::zero();
    for i in lb..=ub {
        let sq = (i * i) as u64;
        count += bounded_rec(rsq - sq, depth + 1, bounds, tail_id, memo);
    }
    memo.insert(key, count.clone());
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(c: &CountResult) -> u64 {
        c.count.to_u64().unwrap()
    }

    #[test]
    fn floor_square_is_exact() {
        assert_eq!(floor_square(2.5).unwrap(), 6);
        assert_eq!(floor_square(3.0).unwrap(), 9);
        assert_eq!(floor_square(0.1).unwrap(), 0);
        assert_eq!(floor_square(2f64.sqrt()).unwrap(), 2);
        assert_eq!(floor_square(3f64.sqrt()).unwrap(), 2);
        assert!(floor_square(-1.0).is_err());
    }

    #[test]
    fn small_examples() {
        assert_eq!(n(&brute_force_count(1, 2.5, DEFAULT_WORK_BUDGET).unwrap()), 5);
        assert_eq!(n(&brute_force_count(2, 1.0, DEFAULT_WORK_BUDGET).unwrap()), 5);
        assert_eq!(n(&brute_force_count(2, 2.0, DEFAULT_WORK_BUDGET).unwrap()), 13);
        assert_eq!(n(&mitchell_count(3, 1.0).unwrap()), 7);
        assert_eq!(n(&mitchell_count(2, 2.0).unwrap()), 13);
        assert_eq!(n(&bounded_count(2.5, &[(0.0, 10.0)]).unwrap()), 3);
        assert_eq!(n(&bounded_count(2.0, &[(0.0, 5.0), (0.0, 5.0)]).unwrap()), 6);
        assert_eq!(n(&bounded_count(2.0, &[(-5.0, 5.0), (-5.0, 5.0)]).unwrap()), 13);
    }

    #[test]
    fn budget_is_enforced() {
        let err = brute_force_count(10, 8.0, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn log2_matches_count() {
        let c = mitchell_count(768, 1.0).unwrap();
        assert_eq!(n(&c), 1 + 2 * 768);
        assert!((c.log2_count - 1537f64.log2()).abs() < 1e-12);
        let big = BigUint::one() << 1000u32;
        assert_eq!(log2_big(&big), 1000.0);
        assert_eq!(log2_big(&BigUint::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn high_dimension_zero_radius() {
        assert_eq!(n(&mitchell_count(768, 0.7067).unwrap()), 1);
        let bounds = vec![(0.0, 255.0); 768];
        assert_eq!(n(&bounded_count(0.7067, &bounds).unwrap()), 1);
    }
}
