//! Handcrafted q-ary watermark: each pixel of a mid-gray cover is offset by
//! one base-`q` digit of the message, staying inside the largest cube that
//! fits the PSNR ball.
//!
//! With `d = ⌊2^k 10^(−τ/20)⌋` the alphabet is `q = 2d + 1`, so the scheme
//! carries `n log2 q` bits, of which `⌊n log2 q⌋` are usable for binary
//! messages.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::format::{Image, ImageFormat};

#[derive(Debug, Clone, PartialEq)]
pub struct QaryScheme {
    pub format: ImageFormat,
    pub tau: f64,
    /// Alphabet size, always odd.
    pub q: u32,
    /// Largest offset from mid-gray, `(q − 1)/2`.
    pub d_floor: u32,
    /// `n·log2 q`.
    pub capacity_bits: f64,
    /// `⌊n·log2 q⌋`, the longest binary message that always fits.
    pub floor_capacity_bits: u64,
    /// `d` was reduced so that mid-gray ± d stays within `[0, ρ]`.
    pub capped: bool,
}

impl QaryScheme {
    pub fn is_zero_capacity(&self) -> bool {
        self.q == 1
    }

    /// `q^n`, the number of distinct codewords.
    pub fn codewords(&self) -> BigUint {
        BigUint::from(self.q).pow(self.format.dim() as u32)
    }

    /// Worst-case PSNR of any codeword against the gray cover,
    /// `20 log10(ρ / d)`.
    pub fn worst_case_psnr(&self) -> f64 {
        if self.d_floor == 0 {
            return f64::INFINITY;
        }
        20.0 * (f64::from(self.format.rho()) / f64::from(self.d_floor)).log10()
    }
}

/// A nonnegative integer message with a declared bit length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    value: BigUint,
    bits: u64,
}

impl Message {
    pub fn new(value: BigUint, bits: u64) -> Result<Self> {
        if value.bits() > bits {
            return invalid(format!("message value needs {} bits, declared {bits}", value.bits()));
        }
        Ok(Self { value, bits })
    }

    /// Big-endian bytes; the bit length is `8·bytes.len()`.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self { value: BigUint::from_bytes_be(bytes), bits: 8 * bytes.len() as u64 }
    }

    /// Big-endian bytes, zero-padded to `⌈bits/8⌉`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = self.bits.div_ceil(8) as usize;
        if self.value.is_zero() {
            return vec![0; len];
        }
        let raw = self.value.to_bytes_be();
        let mut out = vec![0; len.saturating_sub(raw.len())];
        out.extend(raw);
        out
    }

    /// Lowercase hex of [`Message::to_bytes`].
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) {
            return invalid("hex message must have an even number of digits");
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| crate::Error::InvalidArgument(format!("bad hex message: {e}")))?;
        Ok(Self::from_bytes(&bytes))
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
}

/// The scheme for `format` at PSNR `tau`. At very low `tau` the offset is
/// capped at `min(2^(k−1), ρ − 2^(k−1))` so every codeword is a valid image.
pub fn scheme_for(format: ImageFormat, tau: f64) -> Result<QaryScheme> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return invalid(format!("PSNR must be finite and nonnegative, got {tau}"));
    }
    let raw = (f64::from(format.levels()) * 10f64.powf(-tau / 20.0)).floor() as u32;
    let limit = format.mid_gray().min(format.rho() - format.mid_gray());
    let d_floor = raw.min(limit);
    let q = 2 * d_floor + 1;
    let n = format.dim();
    let floor_capacity_bits = if q == 1 { 0 } else { BigUint::from(q).pow(n as u32).bits() - 1 };
    Ok(QaryScheme {
        format,
        tau,
        q,
        d_floor,
        capacity_bits: n as f64 * f64::from(q).log2(),
        floor_capacity_bits,
        capped: raw > limit,
    })
}

/// Largest power of `q` that fits in a `u64`, and its exponent.
fn chunk_base(q: u32) -> (u64, usize) {
    let mut base = u64::from(q);
    let mut m = 1;
    while let Some(next) = base.checked_mul(u64::from(q)) {
        base = next;
        m += 1;
    }
    (base, m)
}

/// Little-endian base-`q` digits of `value`, padded to `len`. Works for any
/// `q ≥ 2` by peeling off word-sized chunks `q^m` at a time.
fn to_digits(value: &BigUint, q: u32, len: usize) -> Vec<u32> {
    let (base, m) = chunk_base(q);
    let base_big = BigUint::from(base);
    let mut digits = Vec::with_capacity(len + m);
    let mut rest = value.clone();
    while digits.len() < len {
        let (quot, rem) = rest.div_rem(&base_big);
        let mut chunk = rem.to_u64().unwrap_or(0);
        for _ in 0..m {
            digits.push((chunk % u64::from(q)) as u32);
            chunk /= u64::from(q);
        }
        rest = quot;
    }
    digits.truncate(len);
    digits
}

/// Inverse of [`to_digits`].
fn from_digits(digits: &[u32], q: u32) -> BigUint {
    let (base, m) = chunk_base(q);
    let mut value = BigUint::zero();
    for chunk in digits.chunks(m).rev() {
        let mut word = 0u64;
        for &d in chunk.iter().rev() {
            word = word * u64::from(q) + u64::from(d);
        }
        let scale = if chunk.len() == m { base } else { u64::from(q).pow(chunk.len() as u32) };
        value = value * scale + word;
    }
    value
}

fn check_fits(scheme: &QaryScheme, message: &Message) -> Result<()> {
    if scheme.q == 1 {
        if message.value.is_zero() {
            return Ok(());
        }
        return invalid(format!("scheme at {} dB has zero capacity", scheme.tau));
    }
    if message.value >= scheme.codewords() {
        return invalid(format!(
            "message of {} bits does not fit; the scheme holds at most {} bits",
            message.bits, scheme.floor_capacity_bits
        ));
    }
    Ok(())
}

/// Digit `i` of the message becomes pixel `i` as `2^(k−1) + digit − d`.
pub fn embed(scheme: &QaryScheme, message: &Message) -> Result<Image> {
    check_fits(scheme, message)?;
    let n = scheme.format.dim();
    let low = scheme.format.mid_gray() - scheme.d_floor;
    let pixels = if scheme.q == 1 {
        vec![low; n]
    } else {
        to_digits(&message.value, scheme.q, n).into_iter().map(|d| low + d).collect()
    };
    Image::new(scheme.format, pixels)
}

fn digits_of(scheme: &QaryScheme, image: &Image) -> Vec<u32> {
    let low = i64::from(scheme.format.mid_gray()) - i64::from(scheme.d_floor);
    let top = i64::from(scheme.q) - 1;
    image.pixels().iter().map(|&p| (i64::from(p) - low).clamp(0, top) as u32).collect()
}

/// Reads every pixel's offset from mid-gray (clamped to the alphabet) and
/// recomposes the message with `floor_capacity_bits` declared bits.
pub fn extract(scheme: &QaryScheme, image: &Image) -> Result<Message> {
    if image.format() != scheme.format {
        return invalid(format!("image is {}, scheme expects {}", image.format(), scheme.format));
    }
    extract_bits(scheme, image, scheme.floor_capacity_bits)
}

/// [`extract`] with an explicit declared length. Codewords beyond `2^bits`
/// are an error.
pub fn extract_bits(scheme: &QaryScheme, image: &Image, bits: u64) -> Result<Message> {
    if image.format() != scheme.format {
        return invalid(format!("image is {}, scheme expects {}", image.format(), scheme.format));
    }
    let value = if scheme.q == 1 { BigUint::zero() } else { from_digits(&digits_of(scheme, image), scheme.q) };
    Message::new(value, bits)
}

/// Replication grid for [`tile_embed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileGrid {
    pub across: usize,
    pub down: usize,
}

impl TileGrid {
    /// The grid that tiles `tile` into `full`.
    pub fn fitting(tile: ImageFormat, full: ImageFormat) -> Result<Self> {
        if tile.channels != full.channels || tile.bit_depth != full.bit_depth {
            return invalid(format!("tile {tile} and image {full} differ in channels or depth"));
        }
        if !full.width.is_multiple_of(tile.width) || !full.height.is_multiple_of(tile.height) {
            return invalid(format!(
                "tile {}x{} does not divide {}x{}",
                tile.width, tile.height, full.width, full.height
            ));
        }
        Ok(Self { across: full.width / tile.width, down: full.height / tile.height })
    }

    fn full_format(&self, tile: ImageFormat) -> Result<ImageFormat> {
        if self.across == 0 || self.down == 0 {
            return invalid("replication grid must be at least 1x1");
        }
        ImageFormat::new(tile.channels, tile.width * self.across, tile.height * self.down, tile.bit_depth)
    }
}

/// Embeds with the tile-sized `scheme` and repeats the codeword over `grid`.
pub fn tile_embed(scheme: &QaryScheme, message: &Message, grid: TileGrid) -> Result<Image> {
    let tile = embed(scheme, message)?;
    let t = scheme.format;
    let full = grid.full_format(t)?;
    let mut pixels = vec![0; full.dim()];
    for c in 0..full.channels {
        for y in 0..full.height {
            for x in 0..full.width {
                pixels[full.index(c, x, y)] = tile.pixels()[t.index(c, x % t.width, y % t.height)];
            }
        }
    }
    Image::new(full, pixels)
}

/// Per-digit majority vote over all replicas (ties go to the smaller digit).
pub fn tile_extract(scheme: &QaryScheme, image: &Image, grid: TileGrid) -> Result<Message> {
    let t = scheme.format;
    let full = grid.full_format(t)?;
    if image.format() != full {
        return invalid(format!("image is {}, tiling expects {full}", image.format()));
    }
    let low = i64::from(t.mid_gray()) - i64::from(scheme.d_floor);
    let top = i64::from(scheme.q) - 1;
    let mut votes = vec![0u32; scheme.q as usize];
    let mut pixels = Vec::with_capacity(t.dim());
    for c in 0..t.channels {
        for y in 0..t.height {
            for x in 0..t.width {
                votes.iter_mut().for_each(|v| *v = 0);
                for ty in 0..grid.down {
                    for tx in 0..grid.across {
                        let p = image.pixels()[full.index(c, tx * t.width + x, ty * t.height + y)];
                        votes[(i64::from(p) - low).clamp(0, top) as usize] += 1;
                    }
                }
                let best = (0..votes.len()).fold(0, |b, d| if votes[d] > votes[b] { d } else { b });
                pixels.push((low + best as i64) as u32);
            }
        }
    }
    extract(scheme, &Image::new(t, pixels)?)
}
