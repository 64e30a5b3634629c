//! The conservative robustness table and the codec capacity ladder.

use std::time::Instant;

use clap::Args;
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use wmcap::bounds::RegimePolicy;
use wmcap::codec::{embed, extract, scheme_for, Message};
use wmcap::format::measure_psnr;
use wmcap::geometry::Precision;
use wmcap::robust::conservative_capacity;
use wmcap::transforms::{crop_rescale, flip_h, linjpeg, rotation, AffineOperator};
use wmcap::{Image, ImageFormat};

use crate::bounds::BoundRow;
use crate::config::PolicyArgs;
use crate::error::{usage, Result};
use crate::output::{self, sig12, OutputArgs};
use crate::parse;

const TABLE1_ROWS: [&str; 7] = ["flip", "crop50", "crop75", "linjpeg10", "linjpeg15", "rot30", "rot45"];

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value = "3,16,16,8")]
    format: String,
    #[arg(long, default_value_t = 42.0)]
    tau: f64,
    /// Subset of flip, crop50, crop75, linjpeg10, linjpeg15, rot30, rot45
    #[arg(long, default_value = "flip,crop50,crop75,linjpeg10,linjpeg15,rot30,rot45")]
    rows: String,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    policy: PolicyArgs,
}

fn table1_operator(name: &str, f: ImageFormat) -> Result<AffineOperator> {
    Ok(match name {
        "flip" => flip_h(f)?,
        "crop50" => crop_rescale(f, 0.5)?,
        "crop75" => crop_rescale(f, 0.75)?,
        "linjpeg10" => linjpeg(f, 10)?,
        "linjpeg15" => linjpeg(f, 15)?,
        "rot30" => rotation(f, 30f64.to_radians())?,
        "rot45" => rotation(f, 45f64.to_radians())?,
        other => return usage(format!("unknown row '{other}'; expected one of {}", TABLE1_ROWS.join(", "))),
    })
}

/// Bound 13 for each transform at one threshold. The series runs at no less
/// than 300 bits with 50 000 terms unless overridden.
pub fn run_table1(args: &Table1Args) -> Result<()> {
    let format = parse::format(&args.format)?;
    let base = RegimePolicy {
        precision: Precision::Auto { min_bits: 300, max_bits: 16_384 },
        terms: 50_000,
        ..RegimePolicy::default()
    };
    let policy = args.policy.resolve(base)?;
    let ops = args.rows.split(',').map(|name| table1_operator(name.trim(), format)).collect::<Result<Vec<_>>>()?;
    let rows = ops
        .par_iter()
        .map(|op| {
            let t = Instant::now();
            let r = conservative_capacity(format, args.tau, op, &policy)?;
            eprintln!(
                "{}: {:.3} bits, rank {}, log2 xi {:.3}{} ({:.1}s)",
                r.transform,
                r.capacity.bits,
                r.rank,
                r.log2_xi,
                if r.clamped { ", clamped at zero" } else { "" },
                t.elapsed().as_secs_f64()
            );
            Ok(BoundRow::robust(&r))
        })
        .collect::<Result<Vec<_>>>()?;
    output::write(&rows, &args.output)
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[arg(long, default_value = "3,256,256,8")]
    format: String,
    #[arg(long, default_value = "36,38,42,48")]
    tau: String,
    /// Skip the random round trip and report capacities only
    #[arg(long)]
    no_verify: bool,
    /// Seed for the random test messages
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct Table2Row {
    tau_db: f64,
    q: u32,
    offset: u32,
    bits: u64,
    bpp: f64,
    psnr_worst_db: f64,
    psnr_measured_db: Option<f64>,
    round_trip: Option<bool>,
}

/// Codec capacities, with a maximum-length random message embedded and
/// extracted at each threshold unless `--no-verify` is given.
pub fn run_table2(args: &Table2Args) -> Result<()> {
    let format = parse::format(&args.format)?;
    let taus = parse::taus(&args.tau)?;
    let rows = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let s = scheme_for(format, tau)?;
            let bits = s.floor_capacity_bits;
            let (measured, round_trip) = if args.no_verify || bits == 0 {
                (None, None)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(i as u64));
                let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
                rng.fill_bytes(&mut bytes);
                bytes[0] &= 0xff >> (8 * bytes.len() as u64 - bits);
                let m = Message::new(BigUint::from_bytes_be(&bytes), bits)?;
                let image = embed(&s, &m)?;
                let psnr = measure_psnr(&image, &Image::gray(format))?;
                (Some(sig12(psnr)), Some(extract(&s, &image)? == m))
            };
            Ok(Table2Row {
                tau_db: sig12(tau),
                q: s.q,
                offset: s.d_floor,
                bits,
                bpp: sig12(bits as f64 / format.dim() as f64),
                psnr_worst_db: sig12(s.worst_case_psnr()),
                psnr_measured_db: measured,
                round_trip,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    output::write(&rows, &args.output)
}
