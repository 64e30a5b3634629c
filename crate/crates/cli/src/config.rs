//! Regime-policy settings from an optional `key = value` file and flags.
//!
//! The file is parsed as TOML, so strings need quotes but plain numbers and
//! comments work as expected. Flags override the file.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use wmcap::bounds::RegimePolicy;
use wmcap::geometry::Precision;

use crate::error::{usage, CliError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    max_count_radius: Option<f64>,
    max_count_dim: Option<usize>,
    max_numeric_dim: Option<usize>,
    precision_bits: Option<u64>,
    precision_min_bits: Option<u64>,
    precision_max_bits: Option<u64>,
    terms: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PolicyArgs {
    /// Settings file with `key = value` lines
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Largest radius for exact lattice counts
    #[arg(long)]
    pub max_count_radius: Option<f64>,
    /// Largest dimension for exact lattice counts
    #[arg(long)]
    pub max_count_dim: Option<usize>,
    /// Largest dimension for the box-ball series
    #[arg(long)]
    pub max_numeric_dim: Option<usize>,
    /// Fixed working precision of the series, in bits
    #[arg(long, conflicts_with_all = ["precision_min_bits", "precision_max_bits"])]
    pub precision_bits: Option<u64>,
    /// Lower end of the automatic precision range
    #[arg(long)]
    pub precision_min_bits: Option<u64>,
    /// Upper end of the automatic precision range
    #[arg(long)]
    pub precision_max_bits: Option<u64>,
    /// Number of series terms
    #[arg(long)]
    pub terms: Option<usize>,
}

impl PolicyArgs {
    /// `base`, then the config file, then the flags.
    pub fn resolve(&self, base: RegimePolicy) -> Result<RegimePolicy> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))?
            }
            None => FileConfig::default(),
        };
        let mut p = base;
        let layers = [
            (file.max_count_radius, file.max_count_dim, file.max_numeric_dim, file.terms),
            (self.max_count_radius, self.max_count_dim, self.max_numeric_dim, self.terms),
        ];
        for (radius, count_dim, numeric_dim, terms) in layers {
            p.max_count_radius = radius.unwrap_or(p.max_count_radius);
            p.max_count_dim = count_dim.unwrap_or(p.max_count_dim);
            p.max_numeric_dim = numeric_dim.unwrap_or(p.max_numeric_dim);
            p.terms = terms.unwrap_or(p.terms);
        }
        p.precision = precision(file.precision_bits, file.precision_min_bits, file.precision_max_bits, p.precision)?;
        p.precision = precision(self.precision_bits, self.precision_min_bits, self.precision_max_bits, p.precision)?;
        p.validate()?;
        Ok(p)
    }
}

fn precision(fixed: Option<u64>, min: Option<u64>, max: Option<u64>, current: Precision) -> Result<Precision> {
    if let Some(bits) = fixed {
        if min.is_some() || max.is_some() {
            return usage("set either precision_bits or the automatic range, not both");
        }
        return Ok(Precision::Fixed(bits));
    }
    if min.is_none() && max.is_none() {
        return Ok(current);
    }
    let (lo, hi) = match current {
        Precision::Auto { min_bits, max_bits } => (min_bits, max_bits),
        Precision::Fixed(bits) => (bits, bits.max(16_384)),
    };
    let (lo, hi) = (min.unwrap_or(lo), max.unwrap_or(hi));
    if lo > hi {
        return usage(format!("precision range {lo}..{hi} is empty"));
    }
    Ok(Precision::Auto { min_bits: lo, max_bits: hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("wmcap-config-{}", std::process::id()));
        std::fs::write(&dir, "# caps\nterms = 123\nmax_numeric_dim = 99\nprecision_bits = 256\n").unwrap();
        let args = PolicyArgs { config: Some(dir.clone()), terms: Some(7), ..PolicyArgs::default() };
        let p = args.resolve(RegimePolicy::default()).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(p.terms, 7);
        assert_eq!(p.max_numeric_dim, 99);
        assert_eq!(p.precision, Precision::Fixed(256));
    }

    #[test]
    fn automatic_range_from_flags() {
        let args = PolicyArgs { precision_min_bits: Some(300), ..PolicyArgs::default() };
        let p = args.resolve(RegimePolicy::default()).unwrap();
        assert_eq!(p.precision, Precision::Auto { min_bits: 300, max_bits: 16_384 });
        let bad = PolicyArgs { precision_min_bits: Some(900), precision_max_bits: Some(400), ..PolicyArgs::default() };
        assert!(bad.resolve(RegimePolicy::default()).is_err());
    }
}
