//! Empirical quantised-image ratios of 2-D linear maps.

use clap::{Args, ValueEnum};
use serde::Serialize;
use wmcap::robust::{empirical_xi_2d, matmul_2d, rotation_2d};
use wmcap::transforms::{singular_spectrum, AffineOperator, Quantizer, Rounding};

use crate::error::{usage, Result};
use crate::output::{self, sig12, OutputArgs};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoundingArg {
    Round,
    Floor,
}

#[derive(Debug, Args)]
pub struct XiArgs {
    /// Map applied in the order given: rot:DEG, diag:A,B or a,b,c,d (row-major)
    #[arg(long = "map", required = true)]
    maps: Vec<String>,
    /// Disk radii, comma-separated
    #[arg(long, default_value = "50,100,200")]
    radius: String,
    #[arg(long, value_enum, default_value_t = RoundingArg::Round)]
    rounding: RoundingArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct XiRow {
    map: String,
    radius: f64,
    xi_empirical: f64,
    xi_predicted: f64,
}

fn map(spec: &str) -> Result<[[f64; 2]; 2]> {
    let nums = |t: &str| -> Result<Vec<f64>> {
        t.split(',')
            .map(|p| match p.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => usage(format!("bad number '{p}' in map '{spec}'")),
            })
            .collect()
    };
    if let Some(deg) = spec.strip_prefix("rot:") {
        return match nums(deg)?[..] {
            [d] => Ok(rotation_2d(d.to_radians())),
            _ => usage(format!("map '{spec}' should be rot:DEG")),
        };
    }
    if let Some(d) = spec.strip_prefix("diag:") {
        return match nums(d)?[..] {
            [a, b] => Ok([[a, 0.0], [0.0, b]]),
            _ => usage(format!("map '{spec}' should be diag:A,B")),
        };
    }
    match nums(spec)?[..] {
        [a, b, c, d] => Ok([[a, b], [c, d]]),
        _ => usage(format!("map '{spec}' should be rot:DEG, diag:A,B or four entries")),
    }
}

pub fn run(args: &XiArgs) -> Result<()> {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for spec in &args.maps {
        m = matmul_2d(map(spec)?, m);
    }
    let op = AffineOperator::from_dense(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]], vec![0.0; 2])?;
    let predicted = singular_spectrum(&op)?.xi;
    let mode = match args.rounding {
        RoundingArg::Round => Rounding::Round,
        RoundingArg::Floor => Rounding::Floor,
    };
    let label = args.maps.join(" then ");
    let mut rows = Vec::new();
    for r in args.radius.split(',') {
        let radius: f64 = r.trim().parse().or_else(|_| usage(format!("bad radius '{r}'")))?;
        rows.push(XiRow {
            map: label.clone(),
            radius: sig12(radius),
            xi_empirical: sig12(empirical_xi_2d(m, radius, Quantizer::unbounded(mode))?),
            xi_predicted: sig12(predicted),
        });
    }
    output::write(&rows, &args.output)
}
