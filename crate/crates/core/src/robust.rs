//! Capacity when the watermark must survive a known linear transform `M`
//! followed by quantisation.
//!
//! The heuristic bounds (10–12) scale the PSNR-only count by
//! `ξ_M = ∏ min(σ_i, 1)` in the `rank M` dimensions that survive; they are
//! neither upper nor lower bounds in general. The conservative bound (13)
//! divides the count by `K`, an over-approximation of how many images one
//! quantisation cell can absorb, obtained by boxing the preimage zonotope.

use std::collections::HashSet;

use crate::bounds::{capacity_gray_center, BoundId, CapacityResult, Regime, RegimePolicy, Validity};
use crate::error::{invalid, Error, Result};
use crate::format::{cube_in_ball_threshold, radius_from_psnr, ImageFormat};
use crate::geometry::{ball_volume_log2, box_ball_intersection_log2vol, LogVolume};
use crate::lattice::mitchell_count;
use crate::transforms::svd::{decompose, rank_tolerance, Decomposition, SingularSpectrum};
use crate::transforms::{AffineOperator, Quantizer};

/// Default largest disk radius for [`empirical_xi_2d`].
pub const XI_2D_RADIUS_BUDGET: f64 = 500.0;

/// Significant bits kept when rounding `β` upward.
const BETA_BITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Heuristic,
    Conservative,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Heuristic => "heuristic",
            BoundKind::Conservative => "conservative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustCapacityResult {
    pub capacity: CapacityResult,
    pub transform: String,
    pub xi: f64,
    pub log2_xi: f64,
    pub rank: usize,
    pub kind: BoundKind,
    /// The raw bound was negative and has been reported as zero.
    pub clamped: bool,
}

fn require_square(op: &AffineOperator, format: ImageFormat) -> Result<()> {
    if !op.is_square() || op.in_dim() != format.dim() {
        return invalid(format!(
            "operator {} is {}x{}, expected {n}x{n} for {format}",
            op.label(),
            op.out_dim(),
            op.in_dim(),
            n = format.dim()
        ));
    }
    Ok(())
}

/// Heuristic capacity under `op` (Bounds 10–12).
///
/// Let `μ = max(σ_max, 1)`. When `ε ≤ ρ/(2μ)` the ball stays inside the cube
/// after the transform and the count (Bound 11) or volume (Bound 10) of the
/// `rank M`-ball is used. Otherwise Bound 12 intersects that ball with the
/// box of half-widths `ρ/(2ε max(1, σ_i))`. Below `20 log10 2`, where the
/// PSNR-only count is the whole cube, the cube count `rank·k` is used instead
/// so that the identity reproduces Bound 2. When the rank exceeds the
/// numeric cap, `min(n·k, Bound 10)` is reported in the min-upper regime.
/// The result never exceeds the PSNR-only capacity at the same `τ`; when
/// that cap applies, the PSNR-only bound's id and regime are reported.
pub fn heuristic_capacity(
    format: ImageFormat,
    tau: f64,
    op: &AffineOperator,
    policy: &RegimePolicy,
) -> Result<RobustCapacityResult> {
    require_square(op, format)?;
    policy.validate()?;
    let spectrum = SingularSpectrum::from_values(decompose(op)?.values());
    heuristic_from_spectrum(format, tau, &spectrum, op.label(), policy)
}

/// [`heuristic_capacity`] for a precomputed spectrum.
pub fn heuristic_from_spectrum(
    format: ImageFormat,
    tau: f64,
    spectrum: &SingularSpectrum,
    label: &str,
    policy: &RegimePolicy,
) -> Result<RobustCapacityResult> {
    let n = format.dim();
    if spectrum.values.len() != n {
        return invalid(format!("spectrum has {} values, expected {n}", spectrum.values.len()));
    }
    let eps = radius_from_psnr(format, tau)?;
    let rho = f64::from(format.rho());
    let rank = spectrum.rank;
    let sigma = spectrum.nonzero();
    let mu = sigma.first().copied().unwrap_or(0.0).max(1.0);
    let stays_inside = eps <= rho / (2.0 * mu);
    let validity = Validity {
        tau,
        epsilon: eps,
        cube_in_ball: tau <= cube_in_ball_threshold(),
        ball_in_cube: stays_inside,
        count_feasible: eps <= policy.max_count_radius && rank <= policy.max_count_dim,
        numeric_feasible: rank <= policy.max_numeric_dim,
    };
    let log2_xi = spectrum.log2_xi;
    let mut diagnostics = None;
    let (raw, id, regime) = if rank == 0 {
        (0.0, BoundId::B11, Regime::BallInCubeCount)
    } else if validity.cube_in_ball && !stays_inside {
        (rank as f64 * f64::from(format.bit_depth), BoundId::B2, Regime::CubeInBall)
    } else if stays_inside {
        if validity.count_feasible {
            (mitchell_count(rank, eps)?.log2_count, BoundId::B11, Regime::BallInCubeCount)
        } else {
            (ball_volume_log2(rank, eps)?, BoundId::B10, Regime::BallInCubeVolume)
        }
    } else if validity.numeric_feasible {
        let axes: Vec<(f64, f64)> = sigma
            .iter()
            .map(|&s| {
                let h = rho / (2.0 * eps * s.max(1.0));
                (-h, h)
            })
            .collect();
        let vol = box_ball_intersection_log2vol(&policy.spec(&axes, 1.0))?;
        diagnostics = vol.diagnostics;
        (rank as f64 * eps.log2() + vol.log2_volume, BoundId::B12, Regime::NontrivialNumeric)
    } else {
        let total = n as f64 * f64::from(format.bit_depth);
        (total.min(ball_volume_log2(rank, eps)?), BoundId::B10, Regime::MinUpper)
    };
    let mut bits = raw + log2_xi;
    let (mut id, mut regime) = (id, regime);
    // A transform only merges images, so the PSNR-only capacity caps the
    // estimate. The cap matters where the volume forms misbehave: at high τ
    // the rank-dimensional ball can outweigh the full one.
    let ceiling = capacity_gray_center(format, tau, policy)?;
    if ceiling.bits < bits {
        bits = ceiling.bits;
        (id, regime) = (ceiling.bound_id, ceiling.regime);
    }
    let capacity = CapacityResult {
        bits: bits.max(0.0),
        bpp: bits.max(0.0) / n as f64,
        bound_id: id,
        regime,
        cover_position: crate::bounds::CoverPosition::Center,
        validity,
        diagnostics,
    };
    Ok(RobustCapacityResult {
        capacity,
        transform: label.to_string(),
        xi: spectrum.xi,
        log2_xi,
        rank,
        kind: BoundKind::Heuristic,
        clamped: bits < 0.0,
    })
}

/// Per-axis half-widths of the box containing every preimage of a unit
/// quantisation cell within a ball of radius `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonotopeBox {
    /// Axes in order of descending singular value; collapsed axes last.
    pub beta: Vec<f64>,
    pub radius: f64,
    pub rank: usize,
}

/// `β = |½ Σ⁺ Uᵀ| 1 + (0, …, 0, r, …, r)`: for each nonzero `σ_i`,
/// `‖u_i‖₁ / (2σ_i)`, then `r` for each of the `n − rank` collapsed axes.
pub fn zonotope_beta(op: &AffineOperator, radius: f64) -> Result<ZonotopeBox> {
    if !op.is_square() {
        return invalid(format!("zonotope needs a square operator, got {}x{}", op.out_dim(), op.in_dim()));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return invalid(format!("radius must be finite and nonnegative, got {radius}"));
    }
    Ok(beta_from_decomposition(&decompose(op)?, radius))
}

fn beta_from_decomposition(d: &Decomposition, radius: f64) -> ZonotopeBox {
    let tol = rank_tolerance(&d.values());
    let mut beta: Vec<f64> = d
        .triplets
        .iter()
        .filter(|t| t.value > tol)
        .map(|t| t.left.iter().map(|e| e.1.abs()).sum::<f64>() / (2.0 * t.value))
        .collect();
    let rank = beta.len();
    beta.resize(d.cols, radius);
    ZonotopeBox { beta, radius, rank }
}

/// Rounds up to `BETA_BITS` significant bits.
fn round_up(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log2().floor() as i32 - BETA_BITS as i32 + 1;
    let q = (-e as f64).exp2();
    (x * q).ceil() / q
}

/// Conservative capacity under `op` (Bound 13):
/// `capacity − log2 K` with `K = vol(∏[−β_i, β_i] ∩ B(0, ε))`.
///
/// `K` is floored at 1 because every quantisation cell holds at least the
/// image it came from; a negative result is reported as zero with
/// `clamped` set.
pub fn conservative_capacity(
    format: ImageFormat,
    tau: f64,
    op: &AffineOperator,
    policy: &RegimePolicy,
) -> Result<RobustCapacityResult> {
    require_square(op, format)?;
    conservative_from_decomposition(format, tau, &decompose(op)?, op.label(), policy)
}

/// [`conservative_capacity`] from a precomputed decomposition, so sweeps
/// over `τ` factor the operator once.
pub fn conservative_from_decomposition(
    format: ImageFormat,
    tau: f64,
    d: &Decomposition,
    label: &str,
    policy: &RegimePolicy,
) -> Result<RobustCapacityResult> {
    if d.rows != format.dim() || d.cols != format.dim() {
        return invalid(format!("decomposition is {}x{}, format {format} has {} values", d.rows, d.cols, format.dim()));
    }
    policy.validate()?;
    let n = format.dim();
    if n > policy.max_numeric_dim {
        return Err(Error::ResourceLimit(format!(
            "conservative bound needs numeric integration in {n} dimensions (cap {})",
            policy.max_numeric_dim
        )));
    }
    let base = capacity_gray_center(format, tau, policy)?;
    let eps = base.validity.epsilon;
    let spectrum = SingularSpectrum::from_values(d.values());
    let zb = beta_from_decomposition(d, eps);
    let vol = preimage_box_log2vol(&zb, policy)?;
    let log2_k = vol.log2_volume.max(0.0);
    let bits = base.bits - log2_k;
    let capacity = CapacityResult {
        bits: bits.max(0.0),
        bpp: bits.max(0.0) / n as f64,
        bound_id: BoundId::B13,
        regime: Regime::NontrivialNumeric,
        cover_position: crate::bounds::CoverPosition::Center,
        validity: base.validity,
        diagnostics: vol.diagnostics,
    };
    Ok(RobustCapacityResult {
        capacity,
        transform: label.to_string(),
        xi: spectrum.xi,
        log2_xi: spectrum.log2_xi,
        rank: zb.rank,
        kind: BoundKind::Conservative,
        clamped: bits < 0.0,
    })
}

/// `log2 vol(∏[−β_i, β_i] ∩ B(0, r))`, the bound on the volume of any
/// quantisation cell's preimage inside a ball of radius `r`. Each `β_i` is
/// first rounded up to 30 significant bits so that values equal up to
/// rounding noise share a group; rounding up keeps the bound valid.
pub fn preimage_box_log2vol(zb: &ZonotopeBox, policy: &RegimePolicy) -> Result<LogVolume> {
    let axes: Vec<(f64, f64)> = zb.beta.iter().map(|&b| (-round_up(b), round_up(b))).collect();
    box_ball_intersection_log2vol(&policy.spec(&axes, zb.radius))
}

/// [`zonotope_beta`] followed by [`preimage_box_log2vol`].
pub fn preimage_log2_volume(op: &AffineOperator, radius: f64, policy: &RegimePolicy) -> Result<f64> {
    Ok(preimage_box_log2vol(&zonotope_beta(op, radius)?, policy)?.log2_volume)
}

/// The lattice disk `B(0, r) ∩ Z²`, row by row.
pub fn disk_points(radius: f64) -> impl Iterator<Item = (i64, i64)> {
    let r = radius.max(0.0).floor() as i64;
    let rsq = radius * radius;
    (-r..=r).flat_map(move |x| {
        let h = (rsq - (x * x) as f64).max(0.0).sqrt().floor() as i64;
        (-h..=h).map(move |y| (x, y))
    })
}

/// `|{Q[Mx] : x ∈ B(0, r) ∩ Z²}| / |B(0, r) ∩ Z²|` by enumeration.
pub fn empirical_xi_2d(m: [[f64; 2]; 2], radius: f64, quantizer: Quantizer) -> Result<f64> {
    empirical_xi_2d_budget(m, radius, quantizer, XI_2D_RADIUS_BUDGET)
}

pub fn empirical_xi_2d_budget(m: [[f64; 2]; 2], radius: f64, quantizer: Quantizer, budget: f64) -> Result<f64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return invalid(format!("radius must be finite and nonnegative, got {radius}"));
    }
    if radius > budget {
        return Err(Error::ResourceLimit(format!("disk radius {radius} exceeds the budget {budget}")));
    }
    let mut images = HashSet::new();
    let mut total = 0u64;
    for (x, y) in disk_points(radius) {
        let (x, y) = (x as f64, y as f64);
        let u = quantizer.level(m[0][0] * x + m[0][1] * y);
        let v = quantizer.level(m[1][0] * x + m[1][1] * y);
        // Integer keys, so that −0 and +0 are the same level.
        images.insert((u as i64, v as i64));
        total += 1;
    }
    Ok(images.len() as f64 / total as f64)
}

/// `R_θ`.
pub fn rotation_2d(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// `a · b`.
pub fn matmul_2d(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// The large-disk limit `1 − (cos θ + sin θ − 1)²` of the rotation factor.
pub fn rotation_xi_limit(theta: f64) -> f64 {
    1.0 - (theta.cos() + theta.sin() - 1.0).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::Rounding;

    fn dense2(m: [f64; 4]) -> AffineOperator {
        AffineOperator::from_dense(2, 2, &m, vec![0.0; 2]).unwrap()
    }

    #[test]
    fn beta_examples() {
        let flip = zonotope_beta(&dense2([0.0, 1.0, 1.0, 0.0]), 3.0).unwrap();
        assert_eq!(flip.beta, vec![0.5, 0.5]);
        let zero = zonotope_beta(&dense2([0.0; 4]), 5.0).unwrap();
        assert_eq!((zero.beta, zero.rank), (vec![5.0, 5.0], 0));
        let diag = zonotope_beta(&dense2([2.0, 0.0, 0.0, 1.0]), 1.0).unwrap();
        assert_eq!(diag.beta, vec![0.25, 0.5]);
    }

    #[test]
    fn beta_is_linear_in_radius_on_collapsed_axes() {
        let op = dense2([1.0, 1.0, 1.0, 1.0]);
        let a = zonotope_beta(&op, 2.0).unwrap();
        let b = zonotope_beta(&op, 6.0).unwrap();
        assert_eq!(a.beta[0], b.beta[0]);
        assert_eq!((a.beta[1], b.beta[1]), (2.0, 6.0));
    }

    #[test]
    fn round_up_is_conservative() {
        for x in [0.1, 1.0 / 3.0, 12345.678, 1e-9] {
            let r = round_up(x);
            assert!(r >= x && (r - x) / x < 1e-8);
        }
        assert_eq!(round_up(0.5), 0.5);
    }

    #[test]
    fn disk_point_count() {
        assert_eq!(disk_points(0.0).count(), 1);
        assert_eq!(disk_points(1.0).count(), 5);
        assert_eq!(disk_points(2.0).count(), 13);
    }

    #[test]
    fn identity_factor_is_one() {
        let q = Quantizer::unbounded(Rounding::Round);
        assert_eq!(empirical_xi_2d([[1.0, 0.0], [0.0, 1.0]], 30.0, q).unwrap(), 1.0);
        assert!(matches!(empirical_xi_2d([[1.0, 0.0], [0.0, 1.0]], 501.0, q), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn rotation_limit_value() {
        assert!((rotation_xi_limit(std::f64::consts::FRAC_PI_4) - 0.828_427_124_746_19).abs() < 1e-12);
    }
}
