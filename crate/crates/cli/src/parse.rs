//! Text forms of formats, threshold ranges and transforms.

use std::path::Path;

use wmcap::transforms::{crop_rescale, flip_h, flip_v, linjpeg, rotation, AffineOperator};
use wmcap::ImageFormat;

use crate::error::{usage, CliError, Result};

fn numbers<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',').map(|p| p.trim().parse().or_else(|_| usage(format!("bad {what} '{p}' in '{text}'")))).collect()
}

/// `c,w,h,k`.
pub fn format(text: &str) -> Result<ImageFormat> {
    match numbers::<usize>(text, "format field")?[..] {
        [c, w, h, k] => Ok(ImageFormat::new(c, w, h, k as u32)?),
        _ => usage(format!("format '{text}' should be c,w,h,k")),
    }
}

/// `start:stop:step` (inclusive) or a comma-separated list, in dB.
pub fn taus(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [_] => {
            let list = numbers::<f64>(text, "threshold")?;
            if list.iter().any(|t| !t.is_finite()) {
                return usage("thresholds must be finite");
            }
            Ok(list)
        }
        [a, b, c] => {
            let [start, stop, step] = [a, b, c].map(|p| p.trim().parse::<f64>().unwrap_or(f64::NAN));
            if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
                return usage(format!("range '{text}' needs finite start <= stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => usage(format!("threshold range '{text}' should be start:stop:step")),
    }
}

/// `name[:parameter]`: `flip_h`, `flip_v`, `crop_rescale:S` (side fraction),
/// `rotation:DEGREES`, `linjpeg:Q`, or `json:PATH` for a saved operator.
pub fn transform(spec: &str, format: ImageFormat) -> Result<AffineOperator> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let value = |what: &str| -> Result<f64> {
        match arg.map(|a| a.trim().parse::<f64>()) {
            Some(Ok(v)) if v.is_finite() => Ok(v),
            _ => usage(format!("transform '{spec}' needs a numeric {what}")),
        }
    };
    let op = match name.replace('-', "_").as_str() {
        "flip_h" => flip_h(format)?,
        "flip_v" => flip_v(format)?,
        "crop_rescale" => crop_rescale(format, value("scale")?)?,
        "rotation" => rotation(format, value("angle")?.to_radians())?,
        "linjpeg" => {
            let q = value("quality")?;
            if q.fract() != 0.0 || q < 0.0 {
                return usage(format!("LinJPEG quality must be an integer, got {q}"));
            }
            linjpeg(format, q as u32)?
        }
        "json" => {
            let path = Path::new(arg.unwrap_or(""));
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let op: AffineOperator =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            if op.in_dim() != format.dim() || op.out_dim() != format.dim() {
                return usage(format!(
                    "operator {} is {}x{}, format {format} has {} values",
                    op.label(),
                    op.out_dim(),
                    op.in_dim(),
                    format.dim()
                ));
            }
            op
        }
        _ => return usage(format!("unknown transform '{spec}'")),
    };
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(taus("0:80:1").unwrap().len(), 81);
        assert_eq!(taus("0:1:0.1").unwrap().len(), 11);
        assert_eq!(taus("36, 38,42").unwrap(), vec![36.0, 38.0, 42.0]);
        assert!(taus("5:1:1").is_err());
        assert!(taus("0:5:0").is_err());
        assert!(taus("0:5").is_err());
    }

    #[test]
    fn formats_and_transforms() {
        let f = format("3,16,16,8").unwrap();
        assert_eq!(f.dim(), 768);
        assert!(format("3,16,16").is_err());
        assert_eq!(transform("crop-rescale:0.5", f).unwrap().label(), "crop-rescale[0.5]");
        assert_eq!(transform("linjpeg:15", f).unwrap().label(), "linjpeg[15]");
        assert!(transform("linjpeg:1.5", f).is_err());
        assert!(transform("rotation", f).is_err());
        assert!(transform("blur:3", f).is_err());
    }
}
