//! Applying a transform to an image file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use wmcap::format::measure_psnr;
use wmcap::transforms::{apply, Rounding};

use crate::error::{CliError, Result};
use crate::{parse, pnm};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoundingArg {
    Round,
    Floor,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Transform spec: flip_h, flip_v, crop_rescale:S, rotation:DEG, linjpeg:Q or json:PATH
    #[arg(long)]
    op: String,
    /// Input PGM or PPM
    #[arg(long)]
    input: PathBuf,
    /// Output image, same format as the input
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = RoundingArg::Round)]
    rounding: RoundingArg,
    /// Also write the operator as JSON for reuse with json:PATH
    #[arg(long)]
    save_operator: Option<PathBuf>,
}

pub fn run(args: &TransformArgs) -> Result<()> {
    let image = pnm::read(&args.input)?;
    let op = parse::transform(&args.op, image.format())?;
    let mode = match args.rounding {
        RoundingArg::Round => Rounding::Round,
        RoundingArg::Floor => Rounding::Floor,
    };
    let out = apply(&op, &image, mode)?;
    pnm::write(&args.output, &out)?;
    if let Some(path) = &args.save_operator {
        let json = serde_json::to_string(&op).map_err(|e| CliError::Output(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| CliError::io(path, e))?;
    }
    let psnr = measure_psnr(&out, &image)?;
    println!("transform={} format={} psnr_db={psnr:.4}", op.label(), image.format());
    Ok(())
}
