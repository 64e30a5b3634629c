//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers or byte buffers and returns JSON or
//! pixels, so the page needs no bundler. The same functions are callable
//! from Rust, which is how they are tested.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use wmcap::bounds::{capacity_corner, capacity_gray_center, RegimePolicy};
use wmcap::robust::{empirical_xi_2d, heuristic_from_spectrum};
use wmcap::transforms::{
    apply, crop_rescale, flip_h, flip_v, linjpeg, rotation, singular_spectrum, AffineOperator, Quantizer, Rounding,
};
use wmcap::{Image, ImageFormat};

/// Largest image side accepted by [`transform_preview`]; the operators are
/// dense enough per pixel that bigger previews stall the page.
pub const MAX_PREVIEW_SIDE: usize = 128;

/// Largest image for the heuristic curve, which needs a full SVD.
pub const MAX_HEURISTIC_DIM: usize = 768;

#[derive(Debug, Serialize)]
struct CurvePoint {
    tau: f64,
    center: f64,
    center_bound: String,
    corner: f64,
    heuristic: Option<f64>,
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn operator(name: &str, param: f64, format: ImageFormat) -> wmcap::Result<AffineOperator> {
    match name {
        "flip_h" => flip_h(format),
        "flip_v" => flip_v(format),
        "crop_rescale" => crop_rescale(format, param),
        "rotation" => rotation(format, param.to_radians()),
        "linjpeg" if param >= 0.0 && param.fract() == 0.0 => linjpeg(format, param as u32),
        _ => Err(wmcap::Error::InvalidArgument(format!("unknown transform {name}:{param}"))),
    }
}

/// PSNR-only capacity at the mid-gray and corner covers for `τ` from `start`
/// to `stop`, plus the heuristic bound under `transform` unless it is
/// `"none"`. Returns a JSON array of points.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn capacity_curve(
    channels: usize,
    width: usize,
    height: usize,
    bit_depth: u32,
    start: f64,
    stop: f64,
    step: f64,
    transform: &str,
    param: f64,
) -> Result<String, JsError> {
    curve(ImageFormat::new(channels, width, height, bit_depth).map_err(err)?, start, stop, step, transform, param)
        .map_err(err)
}

pub fn curve(
    format: ImageFormat,
    start: f64,
    stop: f64,
    step: f64,
    transform: &str,
    param: f64,
) -> wmcap::Result<String> {
    if !(step > 0.0) || !(stop >= start) || (stop - start) / step > 400.0 {
        return Err(wmcap::Error::InvalidArgument("need start <= stop, step > 0 and at most 400 points".into()));
    }
    let policy = RegimePolicy::default();
    let spectrum = match transform {
        "none" => None,
        name => {
            if format.dim() > MAX_HEURISTIC_DIM {
                return Err(wmcap::Error::ResourceLimit(format!(
                    "heuristic curves are limited to {MAX_HEURISTIC_DIM} values, {format} has {}",
                    format.dim()
                )));
            }
            let op = operator(name, param, format)?;
            Some((singular_spectrum(&op)?, op.label().to_string()))
        }
    };
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let tau = start + i as f64 * step;
        let center = capacity_gray_center(format, tau, &policy)?;
        let heuristic = match &spectrum {
            Some((s, label)) => Some(heuristic_from_spectrum(format, tau, s, label, &policy)?.capacity.bits),
            None => None,
        };
        points.push(CurvePoint {
            tau,
            center: center.bits,
            center_bound: center.bound_id.to_string(),
            corner: capacity_corner(format, tau, &policy)?.bits,
            heuristic,
        });
    }
    Ok(serde_json::to_string(&points).expect("plain records serialise"))
}

#[derive(Debug, Serialize)]
struct XiReport {
    empirical: f64,
    predicted: f64,
}

/// Fraction of lattice points in the disk of `radius` that stay distinct
/// after `[[a, b], [c, d]]` and rounding, next to the spectral prediction.
#[wasm_bindgen]
pub fn empirical_xi(a: f64, b: f64, c: f64, d: f64, radius: f64) -> Result<String, JsError> {
    xi_report([[a, b], [c, d]], radius).map_err(err)
}

pub fn xi_report(m: [[f64; 2]; 2], radius: f64) -> wmcap::Result<String> {
    let op = AffineOperator::from_dense(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]], vec![0.0; 2])?;
    let report = XiReport {
        empirical: empirical_xi_2d(m, radius, Quantizer::unbounded(Rounding::Round))?,
        predicted: singular_spectrum(&op)?.xi,
    };
    Ok(serde_json::to_string(&report).expect("plain records serialise"))
}

/// Applies a transform to canvas pixels (RGBA, row-major) and returns RGBA
/// of the same size. Alpha is ignored on input and opaque on output.
#[wasm_bindgen]
pub fn transform_preview(name: &str, param: f64, width: usize, height: usize, rgba: &[u8]) -> Result<Vec<u8>, JsError> {
    preview(name, param, width, height, rgba).map_err(err)
}

pub fn preview(name: &str, param: f64, width: usize, height: usize, rgba: &[u8]) -> wmcap::Result<Vec<u8>> {
    if width > MAX_PREVIEW_SIDE || height > MAX_PREVIEW_SIDE {
        return Err(wmcap::Error::ResourceLimit(format!("preview is limited to {MAX_PREVIEW_SIDE} pixels a side")));
    }
    if rgba.len() != 4 * width * height {
        return Err(wmcap::Error::InvalidArgument(format!(
            "expected {} RGBA bytes for {width}x{height}, got {}",
            4 * width * height,
            rgba.len()
        )));
    }
    let format = ImageFormat::new(3, width, height, 8)?;
    let plane = width * height;
    let mut pixels = vec![0u32; 3 * plane];
    for (p, px) in rgba.chunks_exact(4).enumerate() {
        for c in 0..3 {
            pixels[c * plane + p] = u32::from(px[c]);
        }
    }
    let out = apply(&operator(name, param, format)?, &Image::new(format, pixels)?, Rounding::Round)?;
    let mut rgba_out = vec![255u8; 4 * plane];
    for p in 0..plane {
        for c in 0..3 {
            rgba_out[4 * p + c] = out.pixels()[c * plane + p] as u8;
        }
    }
    Ok(rgba_out)
}
