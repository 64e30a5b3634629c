//! Capacity bounds under a PSNR constraint for a mid-gray cover (Bounds 1–6)
//! and a corner cover (Bounds 7–9), with regime selection.
//!
//! With `ε = ε(τ)` and `n = cwh`, the regimes are separated by two seams:
//! the cube lies inside the ball for `τ ≤ 20 log10 2`, and the ball lies
//! inside the cube for `τ ≥ 20 log10(2√n)`. Ties go to the closed form.

use std::fmt;

use crate::error::{invalid, Result};
use crate::format::{ball_in_cube_threshold, cube_in_ball_threshold, radius_from_psnr, ImageFormat};
use crate::geometry::{ball_volume_log2, box_ball_intersection_log2vol, BoxBallSpec, Precision, SeriesDiagnostics};
use crate::lattice::{bounded_count, mitchell_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    B9,
    B10,
    B11,
    B12,
    B13,
}

impl BoundId {
    pub const PSNR_ONLY: [BoundId; 9] = [
        BoundId::B1,
        BoundId::B2,
        BoundId::B3,
        BoundId::B4,
        BoundId::B5,
        BoundId::B6,
        BoundId::B7,
        BoundId::B8,
        BoundId::B9,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        use BoundId::*;
        [B1, B2, B3, B4, B5, B6, B7, B8, B9, B10, B11, B12, B13].get(usize::from(n).checked_sub(1)?).copied()
    }

    /// The regime a bound belongs to when evaluated directly.
    pub fn natural_regime(self) -> Regime {
        use BoundId::*;
        match self {
            B1 | B2 => Regime::CubeInBall,
            B3 | B7 | B10 => Regime::BallInCubeVolume,
            B4 | B8 | B11 => Regime::BallInCubeCount,
            B5 | B9 | B12 | B13 => Regime::NontrivialNumeric,
            B6 => Regime::MinUpper,
        }
    }

    pub fn cover_position(self) -> CoverPosition {
        match self {
            BoundId::B7 | BoundId::B8 | BoundId::B9 => CoverPosition::Corner,
            _ => CoverPosition::Center,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    CubeInBall,
    BallInCubeVolume,
    BallInCubeCount,
    NontrivialNumeric,
    MinUpper,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::CubeInBall => "cube-in-ball",
            Regime::BallInCubeVolume => "ball-in-cube-volume",
            Regime::BallInCubeCount => "ball-in-cube-count",
            Regime::NontrivialNumeric => "nontrivial-numeric",
            Regime::MinUpper => "min-upper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverPosition {
    Center,
    Corner,
}

impl fmt::Display for CoverPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverPosition::Center => "center",
            CoverPosition::Corner => "corner",
        })
    }
}

/// Which cases are feasible at a given `τ`, and why a bound was chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub tau: f64,
    pub epsilon: f64,
    /// `τ ≤ 20 log10 2`.
    pub cube_in_ball: bool,
    /// `τ ≥ 20 log10(2√n)`.
    pub ball_in_cube: bool,
    /// Radius and dimension within the exact-count caps.
    pub count_feasible: bool,
    /// Dimension within the numeric-integration cap.
    pub numeric_feasible: bool,
}

/// What counts as tractable. Feasibility depends on the host, so these are
/// settings rather than constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimePolicy {
    pub max_count_radius: f64,
    pub max_count_dim: usize,
    pub max_numeric_dim: usize,
    pub precision: Precision,
    pub terms: usize,
}

impl Default for RegimePolicy {
    fn default() -> Self {
        Self {
            max_count_radius: 6.0,
            max_count_dim: 4096,
            max_numeric_dim: 768,
            precision: Precision::default(),
            terms: crate::geometry::DEFAULT_TERMS,
        }
    }
}

impl RegimePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_count_radius > 0.0) || self.max_count_dim == 0 || self.max_numeric_dim == 0 || self.terms == 0 {
            return invalid("regime policy caps must be positive");
        }
        Ok(())
    }

    pub fn validity(&self, format: ImageFormat, tau: f64) -> Result<Validity> {
        let epsilon = radius_from_psnr(format, tau)?;
        let n = format.dim();
        Ok(Validity {
            tau,
            epsilon,
            cube_in_ball: tau <= cube_in_ball_threshold(),
            ball_in_cube: tau >= ball_in_cube_threshold(format),
            count_feasible: epsilon <= self.max_count_radius && n <= self.max_count_dim,
            numeric_feasible: n <= self.max_numeric_dim,
        })
    }

    /// Box–ball evaluation settings for this policy.
    pub fn spec(&self, axes: &[(f64, f64)], radius: f64) -> BoxBallSpec {
        BoxBallSpec::new(axes, radius).with_precision(self.precision).with_terms(self.terms)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub bits: f64,
    /// `bits / n`.
    pub bpp: f64,
    pub bound_id: BoundId,
    pub regime: Regime,
    pub cover_position: CoverPosition,
    pub validity: Validity,
    /// Present when the bound came from the box–ball series.
    pub diagnostics: Option<SeriesDiagnostics>,
}

impl CapacityResult {
    fn new(format: ImageFormat, bits: f64, bound_id: BoundId, regime: Regime, validity: Validity) -> Self {
        Self {
            bits,
            bpp: bits / format.dim() as f64,
            bound_id,
            regime,
            cover_position: bound_id.cover_position(),
            validity,
            diagnostics: None,
        }
    }
}

/// Bound 1: `c·w·h·k` bits.
pub fn bound1_total(format: ImageFormat) -> CapacityResult {
    let bits = format.dim() as f64 * f64::from(format.bit_depth);
    let validity = Validity {
        tau: 0.0,
        epsilon: f64::INFINITY,
        cube_in_ball: true,
        ball_in_cube: false,
        count_feasible: false,
        numeric_feasible: false,
    };
    CapacityResult::new(format, bits, BoundId::B1, Regime::CubeInBall, validity)
}

/// Evaluates one bound at `τ` whether or not its validity condition holds.
pub fn evaluate(format: ImageFormat, tau: f64, id: BoundId, policy: &RegimePolicy) -> Result<CapacityResult> {
    evaluate_in(format, id, id.natural_regime(), policy.validity(format, tau)?, policy)
}

fn evaluate_in(
    format: ImageFormat,
    id: BoundId,
    regime: Regime,
    validity: Validity,
    policy: &RegimePolicy,
) -> Result<CapacityResult> {
    let n = format.dim();
    let eps = validity.epsilon;
    let rho = f64::from(format.rho());
    let total = bound1_total(format).bits;
    let mut diagnostics = None;
    let mut series = |axes: (f64, f64)| -> Result<f64> {
        let vol = box_ball_intersection_log2vol(&policy.spec(&vec![axes; n], 1.0))?;
        diagnostics = vol.diagnostics;
        Ok(n as f64 * eps.log2() + vol.log2_volume)
    };
    let bits = match id {
        BoundId::B1 | BoundId::B2 => total,
        BoundId::B3 => ball_volume_log2(n, eps)?,
        BoundId::B4 => mitchell_count(n, eps)?.log2_count,
        BoundId::B5 => series((-rho / (2.0 * eps), rho / (2.0 * eps)))?,
        BoundId::B6 => total.min(ball_volume_log2(n, eps)?),
        BoundId::B7 => ball_volume_log2(n, eps)? - n as f64,
        BoundId::B8 => bounded_count(eps, &vec![(0.0, rho); n])?.log2_count,
        BoundId::B9 => series((0.0, rho / eps))?,
        other => return invalid(format!("{other} needs a transform; see the robust module")),
    };
    let mut result = CapacityResult::new(format, bits, id, regime, validity);
    result.diagnostics = diagnostics;
    Ok(result)
}

/// Capacity around the mid-gray cover, using the bound valid at `τ`.
///
/// Low PSNR gives Bound 2; high PSNR gives Bound 4 when exact counting is
/// feasible and Bound 3 otherwise; in between, Bound 5 when the dimension
/// allows numeric integration and Bound 6 otherwise. Never below 0 bits.
pub fn capacity_gray_center(format: ImageFormat, tau: f64, policy: &RegimePolicy) -> Result<CapacityResult> {
    policy.validate()?;
    let v = policy.validity(format, tau)?;
    let (id, regime) = if v.cube_in_ball {
        (BoundId::B2, Regime::CubeInBall)
    } else if v.ball_in_cube {
        if v.count_feasible {
            (BoundId::B4, Regime::BallInCubeCount)
        } else {
            (BoundId::B3, Regime::BallInCubeVolume)
        }
    } else if v.numeric_feasible {
        (BoundId::B5, Regime::NontrivialNumeric)
    } else {
        (BoundId::B6, Regime::MinUpper)
    };
    evaluate_in(format, id, regime, v, policy).map(at_least_zero)
}

/// The volume forms can fall below zero at high `τ`, but the cover itself
/// always counts, so the dispatched capacities are floored at 0 bits.
fn at_least_zero(mut r: CapacityResult) -> CapacityResult {
    if r.bits < 0.0 {
        r.bits = 0.0;
        r.bpp = 0.0;
    }
    r
}

/// Capacity around a saturated corner cover, the worst case for any image.
///
/// High PSNR gives Bound 8 when counting is feasible and Bound 7 otherwise;
/// below the ball-in-cube seam, Bound 9 when numeric integration is
/// feasible. Otherwise `min(Bound 1, Bound 7)` is reported as Bound 7 in the
/// min-upper regime.
pub fn capacity_corner(format: ImageFormat, tau: f64, policy: &RegimePolicy) -> Result<CapacityResult> {
    policy.validate()?;
    let v = policy.validity(format, tau)?;
    if v.ball_in_cube {
        let (id, regime) = if v.count_feasible {
            (BoundId::B8, Regime::BallInCubeCount)
        } else {
            (BoundId::B7, Regime::BallInCubeVolume)
        };
        evaluate_in(format, id, regime, v, policy).map(at_least_zero)
    } else if v.numeric_feasible {
        evaluate_in(format, BoundId::B9, Regime::NontrivialNumeric, v, policy).map(at_least_zero)
    } else {
        let mut r = evaluate_in(format, BoundId::B7, Regime::MinUpper, v, policy)?;
        let total = bound1_total(format).bits;
        if total < r.bits {
            r.bits = total;
            r.bpp = total / format.dim() as f64;
        }
        Ok(at_least_zero(r))
    }
}

/// Bits lost when the cover must come from a generative model with
/// `latent_cells` cells, each choosing one of `codebook_size` codes.
pub fn distribution_penalty(latent_cells: u64, codebook_size: u64) -> Result<f64> {
    if latent_cells == 0 || codebook_size == 0 {
        return invalid("latent cells and codebook size must be at least 1");
    }
    Ok(latent_cells as f64 * (codebook_size as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ImageFormat {
        ImageFormat::new(3, 16, 16, 8).unwrap()
    }

    #[test]
    fn total_capacity() {
        assert_eq!(bound1_total(ImageFormat::new(3, 256, 256, 8).unwrap()).bits, 1_572_864.0);
        assert_eq!(bound1_total(ImageFormat::new(1, 1, 1, 1).unwrap()).bits, 1.0);
        assert_eq!(bound1_total(small()).bits, 6144.0);
    }

    #[test]
    fn dispatch_at_the_extremes() {
        let p = RegimePolicy::default();
        let low = capacity_gray_center(small(), 5.0, &p).unwrap();
        assert_eq!((low.bound_id, low.bits), (BoundId::B2, 6144.0));
        let high = capacity_gray_center(small(), 80.0, &p).unwrap();
        assert_eq!((high.bound_id, high.bits), (BoundId::B4, 0.0));
        let corner = capacity_corner(small(), 80.0, &p).unwrap();
        assert_eq!((corner.bound_id, corner.bits), (BoundId::B8, 0.0));
        let vol = capacity_gray_center(small(), 45.0, &p).unwrap();
        assert_eq!(vol.bound_id, BoundId::B3);
        assert_eq!(vol.regime, Regime::BallInCubeVolume);
    }

    #[test]
    fn min_upper_fallbacks() {
        let p = RegimePolicy { max_numeric_dim: 10, ..RegimePolicy::default() };
        let c = capacity_gray_center(small(), 20.0, &p).unwrap();
        assert_eq!((c.bound_id, c.regime), (BoundId::B6, Regime::MinUpper));
        let b3 = evaluate(small(), 20.0, BoundId::B3, &p).unwrap().bits;
        assert_eq!(c.bits, b3.min(6144.0));
        let k = capacity_corner(small(), 20.0, &p).unwrap();
        assert_eq!((k.bound_id, k.regime), (BoundId::B7, Regime::MinUpper));
        assert_eq!(k.bits, (b3 - 768.0).min(6144.0));
    }

    #[test]
    fn penalty() {
        assert_eq!(distribution_penalty(1024, 1024).unwrap(), 10_240.0);
        assert_eq!(distribution_penalty(7, 1).unwrap(), 0.0);
        assert_eq!(distribution_penalty(4, 16).unwrap(), 16.0);
        assert!(distribution_penalty(0, 4).is_err());
    }

    #[test]
    fn bound_numbers_round_trip() {
        for n in 1..=13 {
            assert_eq!(BoundId::from_number(n).unwrap().number(), n);
        }
        assert_eq!(BoundId::from_number(0), None);
        assert_eq!(BoundId::from_number(14), None);
    }
}
