//! Image formats, pixel storage and the PSNR / ℓ2-radius equivalence.
//!
//! Pixels are stored channel-major: the flat index of `(chan, x, y)` is
//! `chan·w·h + y·w + x`. Every operator in [`crate::transforms`] uses the
//! same layout.

use crate::error::{invalid, Result};

/// The `(c, w, h, k)` tuple describing an image grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImageFormat {
    pub channels: usize,
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
}

impl ImageFormat {
    pub fn new(channels: usize, width: usize, height: usize, bit_depth: u32) -> Result<Self> {
        if channels == 0 || width == 0 || height == 0 {
            return invalid("image dimensions must be positive");
        }
        if !(1..=16).contains(&bit_depth) {
            return invalid(format!("bit depth {bit_depth} outside 1..=16"));
        }
        Ok(Self { channels, width, height, bit_depth })
    }

    /// Number of pixel values, `c·w·h`.
    pub fn dim(&self) -> usize {
        self.channels * self.width * self.height
    }

    /// Largest pixel value, `2^k − 1`.
    pub fn rho(&self) -> u32 {
        (1u32 << self.bit_depth) - 1
    }

    /// `2^k`, the peak used by the codec's alphabet size.
    pub fn levels(&self) -> u32 {
        1u32 << self.bit_depth
    }

    /// Mid-gray value `2^(k−1)`.
    pub fn mid_gray(&self) -> u32 {
        1u32 << (self.bit_depth - 1)
    }

    pub fn index(&self, chan: usize, x: usize, y: usize) -> usize {
        chan * self.width * self.height + y * self.width + x
    }

    /// The same grid with a single channel.
    pub fn single_channel(&self) -> Self {
        Self { channels: 1, ..*self }
    }
}

impl std::fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}@{}bit", self.channels, self.width, self.height, self.bit_depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    format: ImageFormat,
    pixels: Vec<u32>,
}

impl Image {
    pub fn new(format: ImageFormat, pixels: Vec<u32>) -> Result<Self> {
        if pixels.len() != format.dim() {
            return invalid(format!("expected {} pixel values for {format}, got {}", format.dim(), pixels.len()));
        }
        let rho = format.rho();
        if let Some(p) = pixels.iter().find(|&&p| p > rho) {
            return invalid(format!("pixel value {p} exceeds peak {rho}"));
        }
        Ok(Self { format, pixels })
    }

    pub fn filled(format: ImageFormat, value: u32) -> Result<Self> {
        Self::new(format, vec![value; format.dim()])
    }

    /// The mid-gray cover image `2^(k−1)·1`.
    pub fn gray(format: ImageFormat) -> Self {
        Self { format, pixels: vec![format.mid_gray(); format.dim()] }
    }

    pub fn format(&self) -> ImageFormat {
        self.format
    }

    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u32> {
        self.pixels
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return invalid(format!("PSNR threshold must be a finite value >= 0 dB, got {tau}"));
    }
    Ok(())
}

/// A minimum-PSNR requirement in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnrConstraint {
    tau: f64,
}

impl PsnrConstraint {
    pub fn new(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn radius(&self, format: ImageFormat) -> f64 {
        radius_unchecked(format, self.tau)
    }
}

fn radius_unchecked(format: ImageFormat, tau: f64) -> f64 {
    f64::from(format.rho()) * (format.dim() as f64).sqrt() * 10f64.powf(-tau / 20.0)
}

/// Largest ℓ2 distance from a cover that still satisfies `PSNR ≥ tau`:
/// `ε(τ) = ρ·√n·10^(−τ/20)`.
pub fn radius_from_psnr(format: ImageFormat, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(radius_unchecked(format, tau))
}

/// Inverse of [`radius_from_psnr`].
pub fn psnr_from_radius(format: ImageFormat, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return invalid(format!("radius must be positive and finite, got {epsilon}"));
    }
    let peak = f64::from(format.rho()) * (format.dim() as f64).sqrt();
    Ok(20.0 * (peak / epsilon).log10())
}

/// `10·log10(ρ²/MSE)`; `f64::INFINITY` for identical images.
pub fn measure_psnr(a: &Image, b: &Image) -> Result<f64> {
    if a.format != b.format {
        return invalid(format!("format mismatch: {} vs {}", a.format, b.format));
    }
    let sse: u64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&p, &q)| {
            let d = u64::from(p.abs_diff(q));
            d * d
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.pixels.len() as f64;
    let rho = f64::from(a.format.rho());
    Ok(10.0 * (rho * rho / mse).log10())
}

/// PSNR seam below which the whole pixel cube lies inside the PSNR ball.
pub fn cube_in_ball_threshold() -> f64 {
    20.0 * 2f64.log10()
}

/// PSNR seam above which the PSNR ball around mid-gray lies inside the cube.
pub fn ball_in_cube_threshold(format: ImageFormat) -> f64 {
    20.0 * (2.0 * (format.dim() as f64).sqrt()).log10()
}
