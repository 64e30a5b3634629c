//! Ball volumes and exact box–ball intersection volumes.

mod boxball;
mod fresnel;
pub(crate) mod mp;
mod saddle;

pub use boxball::{
    box_ball_intersection_log2vol, box_ball_log2vol_estimate, BoxBallSpec, LogVolume, Precision, SeriesDiagnostics,
    DEFAULT_TERMS,
};
pub use fresnel::{fresnel_c, fresnel_f64, fresnel_s};

use crate::error::{invalid, Result};

/// `ln Γ(x)` for `x > 0`: Stirling's series after shifting the argument to
/// at least 15.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument, got {x}");
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Bernoulli terms B_{2j} / (2j(2j−1) z^{2j−1}).
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in COEFFS {
        series += c * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// `log2 vol B(dim, radius) = (dim/2)·log2 π + dim·log2 r − ln Γ(dim/2+1)/ln 2`.
pub fn ball_volume_log2(dim: usize, radius: f64) -> Result<f64> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    let n = dim as f64;
    Ok(n / 2.0 * std::f64::consts::PI.log2() + n * radius.log2() - ln_gamma(n / 2.0 + 1.0) / std::f64::consts::LN_2)
}
