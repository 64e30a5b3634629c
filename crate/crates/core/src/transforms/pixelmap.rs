//! Geometric transforms given by a map `μ(x, y) ↦ (u, v)` from output pixel
//! to source coordinates, with nearest or bilinear interpolation.
//!
//! Sample coordinates outside the frame clamp to the border. Rotation and
//! crop centres are `(w/2, h/2)`, not `((w−1)/2, (h−1)/2)`.

use super::builders::replicate_channels;
use super::operator::AffineOperator;
use crate::error::Result;
use crate::format::ImageFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Nearest,
    Bilinear,
}

/// A source-coordinate map together with its interpolation rule.
#[derive(Clone, Copy)]
pub struct PixelMap<F> {
    pub map: F,
    pub interpolation: Interpolation,
}

impl<F: Fn(f64, f64) -> (f64, f64)> PixelMap<F> {
    pub fn new(map: F, interpolation: Interpolation) -> Self {
        Self { map, interpolation }
    }

    /// The single-channel operator on a `width × height` grid.
    pub fn operator(&self, width: usize, height: usize) -> Result<AffineOperator> {
        let clamp = |v: f64, size: usize| v.clamp(0.0, (size - 1) as f64) as usize;
        let mut entries = Vec::new();
        for y in 0..height {
            for x in 0..width {
                let target = x + y * width;
                let (u, v) = (self.map)(x as f64, y as f64);
                match self.interpolation {
                    Interpolation::Nearest => {
                        let source = clamp(u.round_ties_even(), width) + clamp(v.round_ties_even(), height) * width;
                        entries.push((target, source, 1.0));
                    }
                    Interpolation::Bilinear => {
                        let (ul, uh) = corners(u);
                        let (vl, vh) = corners(v);
                        let denom = (uh - ul) * (vh - vl);
                        let weights = [
                            (ul, vl, (uh - u) * (vh - v) / denom),
                            (ul, vh, (uh - u) * (v - vl) / denom),
                            (uh, vl, (u - ul) * (vh - v) / denom),
                            (uh, vh, (u - ul) * (v - vl) / denom),
                        ];
                        let mut row: Vec<(usize, f64)> = Vec::with_capacity(4);
                        for (su, sv, w) in weights {
                            let source = clamp(su, width) + clamp(sv, height) * width;
                            match row.iter_mut().find(|e| e.0 == source) {
                                Some(e) => e.1 += w,
                                None => row.push((source, w)),
                            }
                        }
                        entries.extend(row.into_iter().map(|(s, w)| (target, s, w)));
                    }
                }
            }
        }
        let n = width * height;
        AffineOperator::new("pixel-map", n, n, entries, vec![0.0; n])
    }

    /// The same map applied to every channel of `format`.
    pub fn build(&self, format: ImageFormat) -> Result<AffineOperator> {
        Ok(replicate_channels(&self.operator(format.width, format.height)?, format.channels))
    }
}

/// `(⌊m⌋, ⌈m⌉)`, with the upper corner bumped when `m` is an integer so the
/// bilinear denominator never vanishes.
fn corners(m: f64) -> (f64, f64) {
    let l = m.floor();
    let u = m.ceil();
    (l, if u == l { l + 1.0 } else { u })
}

/// `(x, y) ↦ (w − 1 − x, y)`, nearest neighbour.
pub fn flip_h(format: ImageFormat) -> Result<AffineOperator> {
    let w = format.width as f64;
    let op = PixelMap::new(|x, y| (w - 1.0 - x, y), Interpolation::Nearest).build(format)?;
    Ok(op.with_label("flip-h"))
}

/// `(x, y) ↦ (x, h − 1 − y)`, nearest neighbour.
pub fn flip_v(format: ImageFormat) -> Result<AffineOperator> {
    let h = format.height as f64;
    let op = PixelMap::new(|x, y| (x, h - 1.0 - y), Interpolation::Nearest).build(format)?;
    Ok(op.with_label("flip-v"))
}

/// Centre crop to a fraction `s` of each side, rescaled back to full size
/// (bilinear). The kept area is `s²`.
pub fn crop_rescale(format: ImageFormat, s: f64) -> Result<AffineOperator> {
    let (cx, cy) = (format.width as f64 / 2.0, format.height as f64 / 2.0);
    let op = PixelMap::new(|x, y| ((x - cx) * s + cx, (y - cy) * s + cy), Interpolation::Bilinear).build(format)?;
    Ok(op.with_label(format!("crop-rescale[{s}]")))
}

/// Rotation about the image centre by `theta` radians (bilinear).
pub fn rotation(format: ImageFormat, theta: f64) -> Result<AffineOperator> {
    let (cx, cy) = (format.width as f64 / 2.0, format.height as f64 / 2.0);
    let (sin, cos) = theta.sin_cos();
    let op = PixelMap::new(
        |x, y| {
            let (dx, dy) = (x - cx, y - cy);
            (dx * cos - dy * sin + cx, dx * sin + dy * cos + cy)
        },
        Interpolation::Bilinear,
    )
    .build(format)?;
    Ok(op.with_label(format!("rotation[{:.6}deg]", theta.to_degrees())))
}
