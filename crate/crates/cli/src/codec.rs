//! Embedding and extracting messages with the q-ary gray-cover codec.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use num_bigint::BigUint;
use wmcap::codec::{embed, extract_bits, scheme_for, tile_embed, tile_extract, Message, QaryScheme, TileGrid};
use wmcap::format::measure_psnr;
use wmcap::{Image, ImageFormat};

use crate::error::{usage, CliError, Result};
use crate::{parse, pnm};

#[derive(Debug, Subcommand)]
pub enum CodecCommand {
    /// Write the marked image carrying a message
    Embed(EmbedArgs),
    /// Read a message back from a marked image
    Extract(ExtractArgs),
    /// Print the alphabet and capacity for a format and threshold
    Capacity(CapacityArgs),
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Image format as c,w,h,k
    #[arg(long, default_value = "3,256,256,8")]
    format: String,
    /// PSNR threshold in dB
    #[arg(long)]
    tau: f64,
    /// Message as hex digits
    #[arg(long, conflicts_with = "message", required_unless_present = "message")]
    hex: Option<String>,
    /// Message as a raw byte file, read big-endian
    #[arg(long)]
    message: Option<PathBuf>,
    /// Message length in bits; defaults to eight per byte
    #[arg(long)]
    bits: Option<u64>,
    /// Replicate the codeword over a grid of tiles, as across,down
    #[arg(long)]
    tiles: Option<String>,
    /// Output PGM or PPM
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    tau: f64,
    /// Marked PGM or PPM
    #[arg(long)]
    input: PathBuf,
    /// Message length in bits; defaults to the scheme's floor capacity
    #[arg(long)]
    bits: Option<u64>,
    /// Tile grid used at embedding, as across,down
    #[arg(long)]
    tiles: Option<String>,
    /// Write the message bytes here instead of printing hex
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long, default_value = "3,256,256,8")]
    format: String,
    #[arg(long)]
    tau: f64,
}

pub fn run(cmd: &CodecCommand) -> Result<()> {
    match cmd {
        CodecCommand::Embed(a) => run_embed(a),
        CodecCommand::Extract(a) => run_extract(a),
        CodecCommand::Capacity(a) => {
            let s = scheme_for(parse::format(&a.format)?, a.tau)?;
            println!(
                "q={} offset={} capacity_bits={:.4} floor_capacity_bits={} bpp={:.6} worst_psnr_db={:.4} capped={}",
                s.q,
                s.d_floor,
                s.capacity_bits,
                s.floor_capacity_bits,
                s.capacity_bits / s.format.dim() as f64,
                s.worst_case_psnr(),
                s.capped
            );
            Ok(())
        }
    }
}

/// The tile scheme and grid, or the whole-image scheme when `tiles` is unset.
fn layout(full: ImageFormat, tau: f64, tiles: Option<&str>) -> Result<(QaryScheme, Option<TileGrid>)> {
    let Some(text) = tiles else {
        return Ok((scheme_for(full, tau)?, None));
    };
    let (a, d) = match text.split_once(',').map(|(a, d)| (a.trim().parse::<usize>(), d.trim().parse::<usize>())) {
        Some((Ok(a), Ok(d))) if a > 0 && d > 0 => (a, d),
        _ => return usage(format!("tile grid '{text}' should be across,down")),
    };
    if !full.width.is_multiple_of(a) || !full.height.is_multiple_of(d) {
        return usage(format!("{full} does not split into a {a}x{d} grid"));
    }
    let tile = ImageFormat::new(full.channels, full.width / a, full.height / d, full.bit_depth)?;
    Ok((scheme_for(tile, tau)?, Some(TileGrid::fitting(tile, full)?)))
}

fn run_embed(a: &EmbedArgs) -> Result<()> {
    let format = parse::format(&a.format)?;
    let bytes = match (&a.hex, &a.message) {
        (Some(hex), _) => Message::from_hex(hex)?.to_bytes(),
        (None, Some(path)) => std::fs::read(path).map_err(|e| CliError::io(path, e))?,
        (None, None) => return usage("give --hex or --message"),
    };
    let message = match a.bits {
        Some(bits) => Message::new(BigUint::from_bytes_be(&bytes), bits)?,
        None => Message::from_bytes(&bytes),
    };
    let (scheme, grid) = layout(format, a.tau, a.tiles.as_deref())?;
    if message.bits() > scheme.floor_capacity_bits {
        return usage(format!(
            "message of {} bits exceeds the capacity of {} bits at {} dB",
            message.bits(),
            scheme.floor_capacity_bits,
            a.tau
        ));
    }
    let image = match grid {
        Some(g) => tile_embed(&scheme, &message, g)?,
        None => embed(&scheme, &message)?,
    };
    pnm::write(&a.output, &image)?;
    println!(
        "q={} message_bits={} capacity_bits={} psnr_db={:.4}",
        scheme.q,
        message.bits(),
        scheme.floor_capacity_bits,
        measure_psnr(&image, &Image::gray(format))?
    );
    Ok(())
}

fn run_extract(a: &ExtractArgs) -> Result<()> {
    let image = pnm::read(&a.input)?;
    let format = image.format();
    let (scheme, grid) = layout(format, a.tau, a.tiles.as_deref())?;
    let bits = a.bits.unwrap_or(scheme.floor_capacity_bits);
    let message = match grid {
        Some(g) => {
            let full = tile_extract(&scheme, &image, g)?;
            Message::new(full.value().clone(), bits)?
        }
        None => extract_bits(&scheme, &image, bits)?,
    };
    let psnr = measure_psnr(&image, &Image::gray(format))?;
    match &a.output {
        Some(path) => {
            std::fs::write(path, message.to_bytes()).map_err(|e| CliError::io(path, e))?;
            println!("message_bits={} psnr_db={psnr:.4}", message.bits());
        }
        None => println!("message={}\nmessage_bits={} psnr_db={psnr:.4}", message.to_hex(), message.bits()),
    }
    Ok(())
}
