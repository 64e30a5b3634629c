//! The LinJPEG building blocks: pixel-wise colour maps, row/column
//! selection, 8×8 DCT, tiling, frequency masking and their composition.

use std::f64::consts::PI;

use super::operator::AffineOperator;
use crate::error::{invalid, Result};
use crate::format::ImageFormat;

/// Luma weights of red and blue; green gets the remainder.
const KR: f64 = 0.299;
const KB: f64 = 0.114;
const KG: f64 = 1.0 - KR - KB;

/// Chroma offset added after the forward colour conversion.
const CHROMA_OFFSET: f64 = 128.0;

/// Level shift applied around the DCT.
const DCT_SHIFT: f64 = 128.0;

/// Applies `p ↦ B p + c` to every pixel; `base` is row-major `c_out × c_in`.
pub fn pixelwise(base: &[f64], c_out: usize, bias: &[f64], format: ImageFormat) -> Result<AffineOperator> {
    let c_in = format.channels;
    if base.len() != c_out * c_in {
        return invalid(format!(
            "pixel-wise base has {} entries, a {c_out}x{c_in} matrix is needed for {format}",
            base.len()
        ));
    }
    if bias.len() != c_out {
        return invalid(format!("pixel-wise bias has {} entries, expected {c_out}", bias.len()));
    }
    let wh = format.width * format.height;
    let mut entries = Vec::with_capacity(c_out * c_in * wh);
    for i in 0..c_out {
        for j in 0..c_in {
            let v = base[i * c_in + j];
            entries.extend((0..wh).map(|p| (i * wh + p, j * wh + p, v)));
        }
    }
    let b = (0..c_out).flat_map(|i| std::iter::repeat_n(bias[i], wh)).collect();
    AffineOperator::new("pixelwise", c_in * wh, c_out * wh, entries, b)
}

/// RGB → YCbCr with the luma weights (0.299, 0.587, 0.114) and chroma
/// offset 128. The chroma rows are `(B − Y)/1.772` and `(R − Y)/1.402`.
pub fn rgb_to_ycbcr_matrix() -> [f64; 9] {
    let cb = 2.0 * (1.0 - KB);
    let cr = 2.0 * (1.0 - KR);
    [
        KR,
        KG,
        KB, //
        -KR / cb,
        -KG / cb,
        (1.0 - KB) / cb,
        (1.0 - KR) / cr,
        -KG / cr,
        -KB / cr,
    ]
}

/// Exact inverse of [`rgb_to_ycbcr_matrix`].
pub fn ycbcr_to_rgb_matrix() -> [f64; 9] {
    let cb = 2.0 * (1.0 - KB);
    let cr = 2.0 * (1.0 - KR);
    [
        1.0,
        0.0,
        cr, //
        1.0,
        -KB * cb / KG,
        -KR * cr / KG,
        1.0,
        cb,
        0.0,
    ]
}

pub fn rgb_to_ycbcr(format: ImageFormat) -> Result<AffineOperator> {
    require_rgb(format)?;
    let op = pixelwise(&rgb_to_ycbcr_matrix(), 3, &[0.0, CHROMA_OFFSET, CHROMA_OFFSET], format)?;
    Ok(op.with_label("rgb-to-ycbcr"))
}

/// Subtracts the chroma offset, then applies the inverse matrix.
pub fn ycbcr_to_rgb(format: ImageFormat) -> Result<AffineOperator> {
    require_rgb(format)?;
    let m = ycbcr_to_rgb_matrix();
    let c: Vec<f64> = (0..3).map(|i| -CHROMA_OFFSET * (m[i * 3 + 1] + m[i * 3 + 2])).collect();
    Ok(pixelwise(&m, 3, &c, format)?.with_label("ycbcr-to-rgb"))
}

fn require_rgb(format: ImageFormat) -> Result<()> {
    if format.channels != 3 {
        return invalid(format!("colour conversion needs 3 channels, got {format}"));
    }
    Ok(())
}

/// Selects `rows × cols` of every channel; output pixel `(ic, ir)` copies
/// input pixel `(cols[ic], rows[ir])`.
pub fn take_rows_and_columns(format: ImageFormat, rows: &[usize], cols: &[usize]) -> Result<AffineOperator> {
    let (w, h) = (format.width, format.height);
    if let Some(r) = rows.iter().find(|&&r| r >= h) {
        return invalid(format!("row {r} outside height {h}"));
    }
    if let Some(c) = cols.iter().find(|&&c| c >= w) {
        return invalid(format!("column {c} outside width {w}"));
    }
    let out_plane = rows.len() * cols.len();
    let mut entries = Vec::with_capacity(out_plane * format.channels);
    for chan in 0..format.channels {
        for (ir, &r) in rows.iter().enumerate() {
            for (ic, &c) in cols.iter().enumerate() {
                entries.push((chan * out_plane + ir * cols.len() + ic, chan * w * h + r * w + c, 1.0));
            }
        }
    }
    let out_dim = out_plane * format.channels;
    AffineOperator::new("take-rows-and-columns", format.dim(), out_dim, entries, vec![0.0; out_dim])
}

fn check_factor(format: ImageFormat, k: usize) -> Result<()> {
    if k == 0 || !format.width.is_multiple_of(k) || !format.height.is_multiple_of(k) {
        return invalid(format!("factor {k} must divide both sides of {format}"));
    }
    Ok(())
}

/// Keeps every `k`-th row and column, starting with the first.
pub fn downsample(format: ImageFormat, k: usize) -> Result<AffineOperator> {
    check_factor(format, k)?;
    let rows: Vec<usize> = (0..format.height).step_by(k).collect();
    let cols: Vec<usize> = (0..format.width).step_by(k).collect();
    Ok(take_rows_and_columns(format, &rows, &cols)?.with_label(format!("downsample[{k}]")))
}

/// Repeats every row and column `k` times.
pub fn upsample(format: ImageFormat, k: usize) -> Result<AffineOperator> {
    if k == 0 {
        return invalid("upsampling factor must be positive");
    }
    let rows: Vec<usize> = (0..format.height).flat_map(|r| std::iter::repeat_n(r, k)).collect();
    let cols: Vec<usize> = (0..format.width).flat_map(|c| std::iter::repeat_n(c, k)).collect();
    Ok(take_rows_and_columns(format, &rows, &cols)?.with_label(format!("upsample[{k}]")))
}

/// The orthonormal 8×8 DCT-II weight linking frequency `(u, v)` and pixel
/// `(x, y)`.
fn dct_weight(u: usize, v: usize, x: usize, y: usize) -> f64 {
    let alpha = |i: usize| if i == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    let c = |p: usize, f: usize| ((2 * p + 1) as f64 * f as f64 * PI / 16.0).cos();
    0.25 * alpha(u) * alpha(v) * c(x, u) * c(y, v)
}

/// `x ↦ D'(x − 128)` on one 8×8 block. Coefficient `(u, v)` sits at
/// `v·8 + u`, pixel `(x, y)` at `y·8 + x`.
pub fn dct8() -> AffineOperator {
    let mut entries = Vec::with_capacity(64 * 64);
    let mut bias = vec![0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            for y in 0..8 {
                for x in 0..8 {
                    let d = dct_weight(u, v, x, y);
                    entries.push((v * 8 + u, y * 8 + x, d));
                    bias[v * 8 + u] -= DCT_SHIFT * d;
                }
            }
        }
    }
    AffineOperator::new("dct8x8", 64, 64, entries, bias).expect("well-formed DCT")
}

/// `G ↦ D'ᵀ G + 128`, the inverse of [`dct8`].
pub fn idct8() -> AffineOperator {
    let mut entries = Vec::with_capacity(64 * 64);
    for y in 0..8 {
        for x in 0..8 {
            for v in 0..8 {
                for u in 0..8 {
                    entries.push((y * 8 + x, v * 8 + u, dct_weight(u, v, x, y)));
                }
            }
        }
    }
    AffineOperator::new("idct8x8", 64, 64, entries, vec![DCT_SHIFT; 64]).expect("well-formed DCT")
}

/// Applies a square `ts² → ts²` block operator to every `ts × ts` tile of a
/// single-channel `width × height` image.
pub fn tiled(block: &AffineOperator, width: usize, height: usize) -> Result<AffineOperator> {
    let ts = (block.in_dim() as f64).sqrt().round() as usize;
    if !block.is_square() || ts * ts != block.in_dim() || ts == 0 {
        return invalid(format!(
            "tile operator must be square on ts² values, got {}x{}",
            block.out_dim(),
            block.in_dim()
        ));
    }
    if !width.is_multiple_of(ts) || !height.is_multiple_of(ts) {
        return invalid(format!("tile size {ts} must divide {width}x{height}"));
    }
    let place = |tx: usize, ty: usize, local: usize| (ty * ts + local / ts) * width + tx * ts + local % ts;
    let tiles = (width / ts) * (height / ts);
    let mut entries = Vec::with_capacity(tiles * block.nnz());
    let mut bias = vec![0.0; width * height];
    for ty in 0..height / ts {
        for tx in 0..width / ts {
            entries.extend(block.triplets().iter().map(|&(r, c, v)| (place(tx, ty, r), place(tx, ty, c), v)));
            for (local, &b) in block.bias().iter().enumerate() {
                bias[place(tx, ty, local)] = b;
            }
        }
    }
    let label = format!("tile[{}]", block.label());
    AffineOperator::new(label, width * height, width * height, entries, bias)
}

/// Keeps DCT coefficient `(u, v)` iff `u + v < q`; `q = 15` keeps all 64.
pub fn jpeg_filter(q: u32) -> Result<AffineOperator> {
    if q > 15 {
        return invalid(format!("quality {q} outside 0..=15"));
    }
    let mask: Vec<f64> = (0..64).map(|i| if ((i / 8 + i % 8) as u32) < q { 1.0 } else { 0.0 }).collect();
    Ok(AffineOperator::diagonal(&mask)?.with_label(format!("jpeg-filter[{q}]")))
}

/// Block-diagonal operator applying `ops[i]` to channel `i`.
pub fn per_channel(ops: &[AffineOperator]) -> AffineOperator {
    AffineOperator::block_diagonal(ops)
}

/// Applies the same single-channel operator to each of `channels` channels.
pub fn replicate_channels(op: &AffineOperator, channels: usize) -> AffineOperator {
    if channels == 1 {
        return op.clone();
    }
    per_channel(&vec![op.clone(); channels]).with_label(op.label().to_string())
}

/// `dct8 | jpeg_filter[q] | idct8`.
fn jpeg_block(q: u32) -> Result<AffineOperator> {
    dct8().then(&jpeg_filter(q)?)?.then(&idct8())
}

/// Linearised JPEG at quality `q ∈ 0..=15`.
///
/// For RGB: colour conversion, luma tiles, chroma downsampled by 2 and tiled,
/// then upsampled and converted back. A single-channel image takes the luma
/// path only.
pub fn linjpeg(format: ImageFormat, q: u32) -> Result<AffineOperator> {
    let block = jpeg_block(q)?;
    let (w, h) = (format.width, format.height);
    let label = format!("linjpeg[{q}]");
    match format.channels {
        1 => Ok(tiled(&block, w, h)?.with_label(label)),
        3 => {
            if w % 16 != 0 || h % 16 != 0 {
                return invalid(format!("LinJPEG on {format} needs both sides divisible by 16"));
            }
            let plane = format.single_channel();
            let luma = tiled(&block, w, h)?;
            let half = ImageFormat::new(1, w / 2, h / 2, format.bit_depth)?;
            let chroma = downsample(plane, 2)?.then(&tiled(&block, w / 2, h / 2)?)?.then(&upsample(half, 2)?)?;
            let op = rgb_to_ycbcr(format)?
                .then(&per_channel(&[luma, chroma.clone(), chroma]))?
                .then(&ycbcr_to_rgb(format)?)?;
            Ok(op.with_label(label))
        }
        c => invalid(format!("LinJPEG needs 1 or 3 channels, got {c}")),
    }
}
