//! `wmcap`: capacity bounds, transforms and the q-ary codec from the command
//! line.
//!
//! Exit status is 0 on success, 2 for invalid arguments, 3 when a resource
//! limit is hit, 4 on a numeric failure and 1 for I/O errors.

mod bounds;
mod codec;
mod config;
mod error;
mod output;
mod parse;
mod pnm;
mod tables;
mod transform;
mod xi;

use clap::{Parser, Subcommand};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "wmcap", version, about = "Image watermarking capacity bounds, transforms and codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep capacity bounds over PSNR thresholds
    Bounds(bounds::BoundsArgs),
    /// Apply a linear transform to a PGM or PPM image
    Transform(transform::TransformArgs),
    /// Embed or extract messages with the q-ary codec
    #[command(subcommand)]
    Codec(codec::CodecCommand),
    /// Empirical quantised-image ratio of a 2-D linear map
    Xi2d(xi::XiArgs),
    /// Conservative capacity under the reference transforms
    Table1(tables::Table1Args),
    /// Codec capacity ladder with round-trip checks
    Table2(tables::Table2Args),
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Bounds(a) => bounds::run(a),
        Command::Transform(a) => transform::run(a),
        Command::Codec(c) => codec::run(c),
        Command::Xi2d(a) => xi::run(a),
        Command::Table1(a) => tables::run_table1(a),
        Command::Table2(a) => tables::run_table2(a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
