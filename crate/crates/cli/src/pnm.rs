//! Binary PGM (`P5`) and PPM (`P6`) images.
//!
//! The maximum value must be `2^k − 1` for a bit depth `k` in `1..=16`;
//! samples above 255 use two big-endian bytes. PPM stores pixels
//! interleaved, so channels are split into the crate's channel-major layout
//! on read and merged again on write.

use std::path::Path;

use wmcap::{Image, ImageFormat};

use crate::error::{usage, CliError, Result};

pub fn read(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write(path: &Path, image: &Image) -> Result<()> {
    std::fs::write(path, encode(image)?).map_err(|e| CliError::io(path, e))
}

struct Header<'a> {
    rest: &'a [u8],
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        loop {
            match self.rest.first() {
                Some(b) if b.is_ascii_whitespace() => self.rest = &self.rest[1..],
                Some(b'#') => {
                    let end = self.rest.iter().position(|&b| b == b'\n').unwrap_or(self.rest.len());
                    self.rest = &self.rest[end..];
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let len = self.rest.iter().take_while(|b| b.is_ascii_digit()).count();
        let text = std::str::from_utf8(&self.rest[..len]).unwrap_or("");
        self.rest = &self.rest[len..];
        text.parse().or_else(|_| usage(format!("bad {what} in image header")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Image> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return usage("not a binary PGM (P5) or PPM (P6) file"),
    };
    let mut h = Header { rest: &bytes[2..] };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maximum value")?;
    if !(1..=65_535).contains(&maxval) || !(maxval + 1).is_power_of_two() {
        return usage(format!("maximum value {maxval} is not 2^k - 1 for k in 1..=16"));
    }
    match h.rest.first() {
        Some(b) if b.is_ascii_whitespace() => h.rest = &h.rest[1..],
        _ => return usage("missing whitespace after image header"),
    }
    let bit_depth = (maxval + 1).trailing_zeros();
    let format = ImageFormat::new(channels, width, height, bit_depth)?;
    let wide = maxval > 255;
    let sample_bytes = if wide { 2 } else { 1 };
    if h.rest.len() != format.dim() * sample_bytes {
        return usage(format!(
            "expected {} bytes of samples for {format}, found {}",
            format.dim() * sample_bytes,
            h.rest.len()
        ));
    }
    let plane = width * height;
    let mut pixels = vec![0u32; format.dim()];
    for (i, chunk) in h.rest.chunks_exact(sample_bytes).enumerate() {
        let v = if wide { u32::from(u16::from_be_bytes([chunk[0], chunk[1]])) } else { u32::from(chunk[0]) };
        let (p, c) = (i / channels, i % channels);
        pixels[c * plane + p] = v;
    }
    Ok(Image::new(format, pixels)?)
}

pub fn encode(image: &Image) -> Result<Vec<u8>> {
    let f = image.format();
    let magic = match f.channels {
        1 => "P5",
        3 => "P6",
        c => return usage(format!("only 1- and 3-channel images can be written, got {c}")),
    };
    let mut out = format!("{magic}\n{} {}\n{}\n", f.width, f.height, f.rho()).into_bytes();
    let plane = f.width * f.height;
    let px = image.pixels();
    for p in 0..plane {
        for c in 0..f.channels {
            let v = px[c * plane + p];
            if f.rho() > 255 {
                out.extend_from_slice(&(v as u16).to_be_bytes());
            } else {
                out.push(v as u8);
            }
        }
    }
    Ok(out)
}
