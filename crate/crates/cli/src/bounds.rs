//! Capacity-bound sweeps over a range of PSNR thresholds.

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use wmcap::bounds::{capacity_corner, capacity_gray_center, evaluate, BoundId, CapacityResult, RegimePolicy};
use wmcap::robust::{conservative_from_decomposition, heuristic_from_spectrum, RobustCapacityResult};
use wmcap::transforms::{decompose, singular_spectrum, SingularSpectrum};

use crate::config::PolicyArgs;
use crate::error::{usage, Result};
use crate::output::{self, sig12, OutputArgs};
use crate::parse;

/// One CSV/JSON record.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub tau_db: f64,
    pub bound_id: String,
    pub regime: String,
    pub bits: f64,
    pub bpp: f64,
    pub cover_position: String,
    pub transform: String,
    pub kind: String,
}

impl BoundRow {
    pub fn psnr_only(r: &CapacityResult) -> Self {
        Self::new(r, "none", "psnr-only")
    }

    pub fn robust(r: &RobustCapacityResult) -> Self {
        Self::new(&r.capacity, &r.transform, &r.kind.to_string())
    }

    fn new(r: &CapacityResult, transform: &str, kind: &str) -> Self {
        Self {
            tau_db: sig12(r.validity.tau),
            bound_id: r.bound_id.to_string(),
            regime: r.regime.to_string(),
            bits: sig12(r.bits),
            bpp: sig12(r.bpp),
            cover_position: r.cover_position.to_string(),
            transform: transform.to_string(),
            kind: kind.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Heuristic,
    Conservative,
    Both,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Image format as c,w,h,k
    #[arg(long, default_value = "3,16,16,8")]
    format: String,
    /// Thresholds in dB: start:stop:step or a list
    #[arg(long, default_value = "0:80:1")]
    tau: String,
    /// PSNR-only bounds: any of center, corner, B1..B9, or none
    #[arg(long, default_value = "center")]
    bounds: String,
    /// Add robustness rows for this transform (e.g. crop_rescale:0.5)
    #[arg(long)]
    transform: Option<String>,
    /// Which robustness bound to report with --transform
    #[arg(long, value_enum, default_value_t = Kind::Heuristic)]
    kind: Kind,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Debug, Clone, Copy)]
enum Selection {
    Center,
    Corner,
    Bound(BoundId),
}

fn selections(text: &str) -> Result<Vec<Selection>> {
    if text.trim() == "none" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            let s = s.trim();
            match s.to_ascii_lowercase().as_str() {
                "center" => Ok(Selection::Center),
                "corner" => Ok(Selection::Corner),
                other => other
                    .strip_prefix('b')
                    .and_then(|n| n.parse().ok())
                    .and_then(BoundId::from_number)
                    .filter(|id| BoundId::PSNR_ONLY.contains(id))
                    .map(Selection::Bound)
                    .map_or_else(|| usage(format!("unknown bound '{s}'")), Ok),
            }
        })
        .collect()
}

pub fn run(args: &BoundsArgs) -> Result<()> {
    let format = parse::format(&args.format)?;
    let taus = parse::taus(&args.tau)?;
    let selected = selections(&args.bounds)?;
    let policy = args.policy.resolve(RegimePolicy::default())?;
    let robust = match &args.transform {
        Some(spec) => {
            let op = parse::transform(spec, format)?;
            let label = op.label().to_string();
            // Factor the operator once for the whole sweep.
            let (spectrum, decomposition) = if args.kind == Kind::Heuristic {
                (singular_spectrum(&op)?, None)
            } else {
                let d = decompose(&op)?;
                (SingularSpectrum::from_values(d.values()), Some(d))
            };
            Some((label, spectrum, decomposition))
        }
        None => None,
    };
    if selected.is_empty() && robust.is_none() {
        return usage("nothing to compute: no bounds and no transform");
    }
    let per_tau: Vec<Vec<BoundRow>> = taus
        .par_iter()
        .map(|&tau| {
            let mut rows = Vec::new();
            for s in &selected {
                let r = match *s {
                    Selection::Center => capacity_gray_center(format, tau, &policy)?,
                    Selection::Corner => capacity_corner(format, tau, &policy)?,
                    Selection::Bound(id) => evaluate(format, tau, id, &policy)?,
                };
                rows.push(BoundRow::psnr_only(&r));
            }
            if let Some((label, spectrum, decomposition)) = &robust {
                if args.kind != Kind::Conservative {
                    rows.push(BoundRow::robust(&heuristic_from_spectrum(format, tau, spectrum, label, &policy)?));
                }
                if let Some(d) = decomposition {
                    rows.push(BoundRow::robust(&conservative_from_decomposition(format, tau, d, label, &policy)?));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    output::write(&per_tau.concat(), &args.output)
}
