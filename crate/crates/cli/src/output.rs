//! CSV and JSON record output.
//!
//! Reals are rounded to 12 significant digits before serialisation, so the
//! same inputs always produce byte-identical files.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,
}

/// `x` rounded to 12 significant digits, with `-0` folded into `0`.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn write<T: Serialize>(rows: &[T], args: &OutputArgs) -> Result<()> {
    let bytes = render(rows, args.output_format)?;
    match &args.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn render<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<Vec<u8>> {
    let broken = |e: &dyn std::fmt::Display| CliError::Output(format!("cannot serialise rows: {e}"));
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| broken(&e))?;
            }
            w.into_inner().map_err(|e| broken(&e))
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(|e| broken(&e))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
